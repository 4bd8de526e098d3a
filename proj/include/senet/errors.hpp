#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace senet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct NonzeroDiagonal : Error {
  using Error::Error;
};

struct IsolatedVertex : Error {
  IsolatedVertex(std::string msg, std::ptrdiff_t vertex_index)
      : Error(std::move(msg)), vertex(vertex_index) {}
  std::ptrdiff_t vertex;
};

struct ClassTooSmall : Error {
  using Error::Error;
};

// File-format violation; `offset` is the byte position of the first
// inconsistency when known, -1 otherwise.
struct FormatError : Error {
  explicit FormatError(std::string msg, std::ptrdiff_t byte_offset = -1)
      : Error(std::move(msg)), offset(byte_offset) {}
  std::ptrdiff_t offset;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace senet
