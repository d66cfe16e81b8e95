#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wordrec/audio.hpp"
#include "wordrec/error.hpp"

namespace wordrec {

namespace {

constexpr uint16_t kFormatPcm = 1;

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t rate = 0;
  uint16_t bits = 0;
};

}  // namespace

Signal read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::missing_file, "cannot open " + path);

  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(Errc::malformed_header, path + ": not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  size_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* hdr = bytes.data() + pos;
    uint32_t chunk_len = read_u32(hdr + 4);
    pos += 8;
    if (pos + chunk_len > bytes.size()) {
      fail(Errc::malformed_header, path + ": truncated chunk");
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) fail(Errc::malformed_header, path + ": short fmt chunk");
      const uint8_t* p = bytes.data() + pos;
      fmt.format = read_u16(p);
      fmt.channels = read_u16(p + 2);
      fmt.rate = read_u32(p + 4);
      fmt.bits = read_u16(p + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_len = chunk_len;
      break;  // fmt is required to precede data
    }
    pos += chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr) {
    fail(Errc::malformed_header, path + ": missing fmt or data chunk");
  }
  if (fmt.format != kFormatPcm) {
    fail(Errc::unsupported_encoding,
         path + ": format tag " + std::to_string(fmt.format) + ", only PCM supported");
  }
  if (fmt.channels != 1) {
    fail(Errc::unsupported_channels,
         path + ": " + std::to_string(fmt.channels) + " channels, only mono supported");
  }
  if (fmt.rate == 0) fail(Errc::malformed_header, path + ": zero sample rate");
  if (fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24) {
    fail(Errc::unsupported_encoding,
         path + ": " + std::to_string(fmt.bits) + "-bit PCM not supported");
  }

  const size_t bytes_per_sample = fmt.bits / 8;
  const size_t count = data_len / bytes_per_sample;

  Signal s;
  s.rate = static_cast<int>(fmt.rate);
  s.samples.resize(count);
  switch (fmt.bits) {
    case 8:
      for (size_t i = 0; i < count; ++i) {
        s.samples[i] = (static_cast<int>(data[i]) - 128) / 128.0;
      }
      break;
    case 16:
      for (size_t i = 0; i < count; ++i) {
        int16_t v = static_cast<int16_t>(data[2 * i] | data[2 * i + 1] << 8);
        s.samples[i] = v / 32768.0;
      }
      break;
    case 24:
      for (size_t i = 0; i < count; ++i) {
        int32_t v = data[3 * i] | data[3 * i + 1] << 8 | data[3 * i + 2] << 16;
        if (v & 0x800000) v -= 0x1000000;
        s.samples[i] = v / 8388608.0;
      }
      break;
  }
  return s;
}

void write_wav16(const Signal& s, const std::string& path) {
  if (s.rate <= 0) fail(Errc::invalid_config, "write_wav16: rate must be positive");

  const uint32_t data_len = static_cast<uint32_t>(s.samples.size() * 2);
  const uint32_t rate = static_cast<uint32_t>(s.rate);
  const uint32_t byte_rate = rate * 2;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot create " + path);

  auto put_u32 = [&](uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&](uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(byte_rate);
  put_u16(2);   // block align
  put_u16(16);  // bits
  out.write("data", 4);
  put_u32(data_len);

  for (double x : s.samples) {
    long v = std::lround(x * 32767.0);
    if (v > 32767) v = 32767;
    if (v < -32768) v = -32768;
    put_u16(static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  if (!out) fail(Errc::io_failure, "write failed: " + path);
}

}  // namespace wordrec
