#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bpfl {

/// Tensor in the IDX binary format used by the MNIST distribution:
/// big-endian magic 0x00 0x00 <dtype> <rank>, rank 4-byte dimension sizes,
/// then the raw payload. Only dtype 0x08 (unsigned byte) is supported.
struct IdxTensor {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (std::uint32_t d : dims) n *= d;
        return n;
    }
};

/// Throws FormatError on a wrong magic and a length error naming expected
/// vs actual byte counts on truncation.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
IdxTensor parse_idx_file(const std::string& path);

std::vector<std::uint8_t> serialize_idx(const IdxTensor& t);

} // namespace bpfl
