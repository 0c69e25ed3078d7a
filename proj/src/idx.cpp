#include "bpfl/idx.hpp"

#include <fstream>

#include "bpfl/errors.hpp"

namespace bpfl {

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw FormatError("idx: shorter than the 4-byte magic");
    if (bytes[0] != 0 || bytes[1] != 0)
        throw FormatError("idx: bad magic (leading bytes must be zero)");
    if (bytes[2] != 0x08) throw FormatError("idx: unsupported dtype (only unsigned byte)");
    unsigned rank = bytes[3];
    if (rank == 0) throw FormatError("idx: zero-rank tensor");
    std::size_t header = 4 + 4 * static_cast<std::size_t>(rank);
    if (bytes.size() < header)
        throw FormatError("idx: truncated header (expected " + std::to_string(header) +
                          " bytes, have " + std::to_string(bytes.size()) + ")");
    IdxTensor t;
    t.dims.reserve(rank);
    for (unsigned i = 0; i < rank; ++i) {
        std::size_t at = 4 + 4 * i;
        std::uint32_t d = (std::uint32_t(bytes[at]) << 24) | (std::uint32_t(bytes[at + 1]) << 16) |
                          (std::uint32_t(bytes[at + 2]) << 8) | std::uint32_t(bytes[at + 3]);
        t.dims.push_back(d);
    }
    std::size_t expected = header + t.element_count();
    if (bytes.size() != expected)
        throw FormatError("idx: payload length mismatch (expected " + std::to_string(expected) +
                          " bytes, have " + std::to_string(bytes.size()) + ")");
    t.data.assign(bytes.begin() + static_cast<long>(header), bytes.end());
    return t;
}

IdxTensor parse_idx_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("idx: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_idx(bytes);
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& t) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 4 * t.dims.size() + t.data.size());
    out.push_back(0);
    out.push_back(0);
    out.push_back(0x08);
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) {
        out.push_back(static_cast<std::uint8_t>(d >> 24));
        out.push_back(static_cast<std::uint8_t>(d >> 16));
        out.push_back(static_cast<std::uint8_t>(d >> 8));
        out.push_back(static_cast<std::uint8_t>(d));
    }
    out.insert(out.end(), t.data.begin(), t.data.end());
    return out;
}

} // namespace bpfl
