#include "ifta/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace ifta {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  if (ch == EOF) throw std::runtime_error("truncated PGM header: " + path);
  int v = 0;
  bool any = false;
  while (ch != EOF && std::isdigit(ch)) {
    v = v * 10 + (ch - '0');
    any = true;
    ch = in.get();
  }
  if (!any) throw std::runtime_error("malformed PGM header: " + path);
  return v;
}

}  // namespace

ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM file: " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5')
    throw std::runtime_error("not a binary P5 PGM: " + path);
  const int w = next_header_int(in, path);
  const int h = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (w <= 0 || h <= 0 || (maxval != 255 && maxval != 65535))
    throw std::runtime_error("unsupported PGM geometry/maxval: " + path);

  ImageGrid img = ImageGrid::zeros(w, h);
  const size_t npx = static_cast<size_t>(w) * h;
  if (maxval == 255) {
    std::vector<uint8_t> buf(npx);
    in.read(reinterpret_cast<char*>(buf.data()), npx);
    if (static_cast<size_t>(in.gcount()) != npx)
      throw std::runtime_error("truncated PGM data: " + path);
    for (size_t i = 0; i < npx; ++i) img.values[i] = buf[i];
  } else {
    std::vector<uint8_t> buf(npx * 2);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (static_cast<size_t>(in.gcount()) != buf.size())
      throw std::runtime_error("truncated PGM data: " + path);
    for (size_t i = 0; i < npx; ++i)
      img.values[i] = 256.0 * buf[2 * i] + buf[2 * i + 1];
  }
  return img;
}

void write_pgm(const std::string& path, const ImageGrid& img, int maxval) {
  if (maxval != 255 && maxval != 65535)
    throw std::runtime_error("write_pgm: maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PGM file: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  const size_t npx = img.values.size();
  if (maxval == 255) {
    std::vector<uint8_t> buf(npx);
    for (size_t i = 0; i < npx; ++i)
      buf[i] = static_cast<uint8_t>(std::clamp(std::lround(img.values[i]), 0L, 255L));
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  } else {
    std::vector<uint8_t> buf(npx * 2);
    for (size_t i = 0; i < npx; ++i) {
      const long v = std::clamp(std::lround(img.values[i]), 0L, 65535L);
      buf[2 * i] = static_cast<uint8_t>(v >> 8);
      buf[2 * i + 1] = static_cast<uint8_t>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  }
}

}  // namespace ifta
