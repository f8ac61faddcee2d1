/*
Copyright (c) 2026 The diskgraph authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef DISKGRAPH_COMMON_HPP
#define DISKGRAPH_COMMON_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace dg {

using VertexId = std::uint64_t;

static_assert(std::endian::native == std::endian::little,
              "on-disk and wire layouts are little-endian; big-endian hosts are unsupported");

// ---- error taxonomy ----------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input bytes do not form a whole record (truncated stream, short frame).
struct FramingError : Error {
  using Error::Error;
};

// A stream or file violates an internal consistency contract.
struct CorruptionError : Error {
  using Error::Error;
};

// Malformed user input (graph text, config files).
struct ParseError : Error {
  using Error::Error;
};

// Invalid or inconsistent job configuration.
struct ConfigError : Error {
  using Error::Error;
};

// A worker observed a violation of the superstep protocol.
struct ProtocolError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// ---- little-endian scalar codec ----------------------------------------

inline void put_u64(std::uint8_t* p, std::uint64_t v) { std::memcpy(p, &v, 8); }
inline std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return v;
}
inline void put_u32(std::uint8_t* p, std::uint32_t v) { std::memcpy(p, &v, 4); }
inline std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}
inline void put_f64(std::uint8_t* p, double v) { std::memcpy(p, &v, 8); }
inline double get_f64(const std::uint8_t* p) {
  double v;
  std::memcpy(&v, p, 8);
  return v;
}

// Marker for payloads that occupy zero bytes (unweighted edges).
struct Empty {
  friend bool operator==(Empty, Empty) { return true; }
};

// Fixed-width codec for the scalar payload types used by vertex programs.
// Every vertex value, edge weight and message type must specialize this
// (or be one of the types below).
template <class T>
struct Codec;

template <>
struct Codec<std::uint64_t> {
  static constexpr std::size_t size = 8;
  static void encode(std::uint8_t* p, std::uint64_t v) { put_u64(p, v); }
  static std::uint64_t decode(const std::uint8_t* p) { return get_u64(p); }
};

template <>
struct Codec<double> {
  static constexpr std::size_t size = 8;
  static void encode(std::uint8_t* p, double v) { put_f64(p, v); }
  static double decode(const std::uint8_t* p) { return get_f64(p); }
};

template <>
struct Codec<Empty> {
  static constexpr std::size_t size = 0;
  static void encode(std::uint8_t*, Empty) {}
  static Empty decode(const std::uint8_t*) { return {}; }
};

// Two-id payload used by the id-recoding preprocessing job.
struct IdPair {
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  friend bool operator==(const IdPair&, const IdPair&) = default;
};

template <>
struct Codec<IdPair> {
  static constexpr std::size_t size = 16;
  static void encode(std::uint8_t* p, const IdPair& v) {
    put_u64(p, v.first);
    put_u64(p + 8, v.second);
  }
  static IdPair decode(const std::uint8_t* p) {
    return IdPair{get_u64(p), get_u64(p + 8)};
  }
};

}  // namespace dg

#endif
