#pragma once

#include <stdexcept>
#include <string>

namespace facedup {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (manifests, sidecars, lists).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while reading or writing dataset files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An image file that could not be decoded; carries the image id.
class DecodeError : public Error {
 public:
  DecodeError(std::string image_id, const std::string& what)
      : Error(image_id.empty() ? what : image_id + ": " + what),
        image_id_(std::move(image_id)) {}

  const std::string& image_id() const noexcept { return image_id_; }

 private:
  std::string image_id_;
};

}  // namespace facedup
