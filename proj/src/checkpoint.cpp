#include <array>
#include <bit>
#include <cstdint>
#include <type_traits>
#include <istream>
#include <ostream>

#include "qim/errors.hpp"
#include "qim/quantum.hpp"

namespace qim {
namespace {

constexpr std::array<char, 5> magic{'Q', 'I', 'M', 'W', 'F'};

template <typename T>
void put_le(std::ostream& os, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    bits = std::bit_cast<std::uint64_t>(static_cast<double>(v));
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(b, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  is.read(reinterpret_cast<char*>(b), sizeof(T));
  require(static_cast<bool>(is), "checkpoint: truncated file", ErrorCategory::missing_artifact);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

void write_checkpoint(std::ostream& os, const WaveFunction& psi) {
  os.write(magic.data(), magic.size());
  put_le<std::uint32_t>(os, checkpoint_version);
  put_le<std::uint64_t>(os, psi.size());
  put_le<double>(os, psi.grid().start);
  put_le<double>(os, psi.grid().step);
  for (const auto& v : psi.amplitudes()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
  require(static_cast<bool>(os), "checkpoint: write failed", ErrorCategory::resource);
}

WaveFunction read_checkpoint(std::istream& is) {
  std::array<char, 5> m{};
  is.read(m.data(), m.size());
  require(static_cast<bool>(is) && m == magic, "checkpoint: bad magic", ErrorCategory::missing_artifact);
  const auto version = get_le<std::uint32_t>(is);
  require(version == checkpoint_version, "checkpoint: unsupported version", ErrorCategory::missing_artifact);
  const auto n = get_le<std::uint64_t>(is);
  require(n > 0 && n < (std::uint64_t{1} << 32), "checkpoint: implausible size", ErrorCategory::missing_artifact);
  UniformGrid g{get_le<double>(is), get_le<double>(is), static_cast<std::size_t>(n)};
  std::vector<cplx> a(g.size);
  for (auto& v : a) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  return WaveFunction(g, std::move(a));
}

}  // namespace qim
