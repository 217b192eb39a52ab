#include "gridhtm/image_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "gridhtm/errors.hpp"

namespace gridhtm {

namespace {

// Reads the magic and the given number of unsigned header fields. Comments
// run from '#' to end of line; exactly one whitespace byte ends the header.
class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void expect_magic(std::string_view magic, std::string_view kind) {
    if (bytes_.substr(0, magic.size()) != magic) throw IoError("not a binary " + std::string(kind) + " file");
    pos_ = magic.size();
  }

  std::size_t number() {
    skip_space_and_comments();
    std::size_t value = 0;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    const auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || end == first) throw IoError("malformed image header");
    pos_ += static_cast<std::size_t>(end - first);
    return value;
  }

  std::size_t finish() {
    if (pos_ >= bytes_.size() || std::isspace(static_cast<unsigned char>(bytes_[pos_])) == 0) {
      throw IoError("malformed image header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = static_cast<unsigned char>(bytes_[pos_]);
      if (std::isspace(c) != 0) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string header(std::string_view magic, std::size_t cols, std::size_t rows) {
  return std::string(magic) + "\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n";
}

}  // namespace

Bitmap decode_pbm(std::string_view bytes) {
  HeaderReader reader(bytes);
  reader.expect_magic("P4", "PBM");
  const std::size_t cols = reader.number();
  const std::size_t rows = reader.number();
  const std::size_t offset = reader.finish();
  if (cols == 0 || rows == 0) throw IoError("PBM image has zero size");
  const std::size_t stride = (cols + 7) / 8;
  if (bytes.size() - offset < stride * rows) throw IoError("PBM pixel data is truncated");

  Bitmap bitmap(rows, cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto* row = reinterpret_cast<const unsigned char*>(bytes.data() + offset + r * stride);
    for (std::size_t c = 0; c < cols; ++c) {
      bitmap.at(r, c) = static_cast<std::uint8_t>((row[c / 8] >> (7 - c % 8)) & 1U);
    }
  }
  return bitmap;
}

std::string encode_pbm(const Bitmap& bitmap) {
  std::string out = header("P4", bitmap.cols(), bitmap.rows());
  const std::size_t stride = (bitmap.cols() + 7) / 8;
  for (std::size_t r = 0; r < bitmap.rows(); ++r) {
    std::string row(stride, '\0');
    for (std::size_t c = 0; c < bitmap.cols(); ++c) {
      if (bitmap.at(r, c) != 0) row[c / 8] = static_cast<char>(row[c / 8] | (0x80 >> (c % 8)));
    }
    out += row;
  }
  return out;
}

RgbImage decode_ppm(std::string_view bytes) {
  HeaderReader reader(bytes);
  reader.expect_magic("P6", "PPM");
  const std::size_t cols = reader.number();
  const std::size_t rows = reader.number();
  const std::size_t maxval = reader.number();
  const std::size_t offset = reader.finish();
  if (maxval != 255) throw IoError("only 8-bit PPM images are supported");
  if (bytes.size() - offset < rows * cols * 3) throw IoError("PPM pixel data is truncated");

  RgbImage image(rows, cols);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    image.values()[i] = Rgb{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return image;
}

std::string encode_ppm(const RgbImage& image) {
  std::string out = header("P6", image.cols(), image.rows()) + "255\n";
  out.reserve(out.size() + image.values().size() * 3);
  for (const Rgb& px : image.values()) {
    out.push_back(static_cast<char>(px.r));
    out.push_back(static_cast<char>(px.g));
    out.push_back(static_cast<char>(px.b));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

Bitmap read_pbm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_pbm(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_pbm(const std::filesystem::path& path, const Bitmap& bitmap) { write_file(path, encode_pbm(bitmap)); }

void write_ppm(const std::filesystem::path& path, const RgbImage& image) { write_file(path, encode_ppm(image)); }

std::string frame_stem(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(index));
  return buf;
}

}  // namespace gridhtm
