#include "facedup/corpus/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "facedup/error.hpp"

namespace facedup::corpus {
namespace {

cv::Mat to_bgr_mat(const PixelBuffer& buf) {
  if (buf.empty()) throw Error("cannot encode an empty pixel buffer");
  if (buf.channels == 1) {
    return cv::Mat(buf.height, buf.width, CV_8UC1,
                   const_cast<std::uint8_t*>(buf.data.data()))
        .clone();
  }
  cv::Mat rgb(buf.height, buf.width, CV_8UC3,
              const_cast<std::uint8_t*>(buf.data.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

std::vector<std::byte> encode(const PixelBuffer& buf, const char* ext,
                              const std::vector<int>& params) {
  std::vector<uchar> out;
  if (!cv::imencode(ext, to_bgr_mat(buf), out, params)) {
    throw Error(std::string("image encoding failed for ") + ext);
  }
  std::vector<std::byte> bytes(out.size());
  std::memcpy(bytes.data(), out.data(), out.size());
  return bytes;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Corrupt-data warnings (premature EOF, bad Huffman codes) are fatal: a
// partially decoded image must not be hashed as if it were complete.
void jpeg_warn(j_common_ptr cinfo, int msg_level) {
  if (msg_level < 0) jpeg_fail(cinfo);
}

bool looks_like_jpeg(std::span<const std::byte> bytes) {
  return bytes.size() >= 3 && bytes[0] == std::byte{0xFF} &&
         bytes[1] == std::byte{0xD8} && bytes[2] == std::byte{0xFF};
}

// Returns false and fills `message` on failure. Kept free of objects with
// non-trivial destructors between setjmp and the possible longjmp.
bool decode_jpeg_into(std::span<const std::byte> bytes, PixelBuffer& out,
                      std::string& message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_fail;
  err.base.emit_message = jpeg_warn;
  if (setjmp(err.jump)) {
    message = err.message;
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
               static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.channels = 3;
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data.data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace

PixelBuffer decode_canonical(std::span<const std::byte> bytes,
                             const std::string& image_id) {
  if (bytes.empty()) throw DecodeError(image_id, "empty image file");
  if (looks_like_jpeg(bytes)) {
    PixelBuffer out;
    std::string message;
    if (!decode_jpeg_into(bytes, out, message)) {
      throw DecodeError(image_id, "jpeg: " + message);
    }
    if (out.empty()) throw DecodeError(image_id, "jpeg: empty image");
    return out;
  }
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<std::byte*>(bytes.data()));
  cv::Mat bgr;
  try {
    bgr = cv::imdecode(raw, cv::IMREAD_COLOR | cv::IMREAD_IGNORE_ORIENTATION);
  } catch (const cv::Exception& e) {
    throw DecodeError(image_id, e.what());
  }
  if (bgr.empty() || bgr.type() != CV_8UC3) {
    throw DecodeError(image_id, "unsupported or corrupt image data");
  }
  PixelBuffer out(bgr.cols, bgr.rows, 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y, 0) = row[x][2];
      out.at(x, y, 1) = row[x][1];
      out.at(x, y, 2) = row[x][0];
    }
  }
  return out;
}

PixelBuffer to_grayscale(const PixelBuffer& buf) {
  if (buf.channels == 1) return buf;
  PixelBuffer out(buf.width, buf.height, 1);
  const std::size_t n = static_cast<std::size_t>(buf.width) * buf.height;
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = luma(buf.data[3 * i], buf.data[3 * i + 1], buf.data[3 * i + 2]);
  }
  return out;
}

std::vector<std::byte> encode_png(const PixelBuffer& buf) {
  return encode(buf, ".png", {cv::IMWRITE_PNG_COMPRESSION, 6});
}

std::vector<std::byte> encode_bmp(const PixelBuffer& buf) {
  return encode(buf, ".bmp", {});
}

std::vector<std::byte> encode_jpeg(const PixelBuffer& buf, int quality) {
  return encode(buf, ".jpg", {cv::IMWRITE_JPEG_QUALITY, quality});
}

}  // namespace facedup::corpus
