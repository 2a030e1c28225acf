#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "core/frame.hpp"
#include "core/grid.hpp"

namespace evs {

/// Binary capture container. All integers little-endian; complex samples are
/// float32 (re, im) pairs; matrices are stored subcarrier-major.
struct CaptureHeader {
    static constexpr char kMagic[4] = {'E', 'V', 'S', 'C'};
    static constexpr std::uint16_t kVersion = 1;
    static constexpr std::uint16_t kFlagMeta = 1;  // bit 0: per-packet metadata block

    std::uint16_t version = kVersion;
    std::uint16_t k = 0;
    std::uint16_t n_ltf = 0;
    std::uint16_t n_df = 0;
    std::uint32_t packet_count = 0;
    std::uint16_t flags = 0;

    bool has_meta() const { return (flags & kFlagMeta) != 0; }
    std::size_t packet_bytes() const;
    static constexpr std::size_t header_bytes() { return 18; }
};

/// Streams packets to a temporary file; close() validates the declared
/// packet count and atomically renames into place.
class CaptureWriter {
public:
    CaptureWriter(const std::string& path, const CaptureHeader& header);
    ~CaptureWriter();
    CaptureWriter(const CaptureWriter&) = delete;
    CaptureWriter& operator=(const CaptureWriter&) = delete;

    void append(const Packet& packet);
    void close();

private:
    std::string path_;
    std::string tmp_path_;
    CaptureHeader header_;
    std::FILE* f_ = nullptr;
    std::uint32_t written_ = 0;
    bool closed_ = false;
};

/// Sequential reader with eager header validation. The file length must
/// match the declared packet count exactly.
class CaptureReader {
public:
    explicit CaptureReader(const std::string& path);
    ~CaptureReader();
    CaptureReader(const CaptureReader&) = delete;
    CaptureReader& operator=(const CaptureReader&) = delete;

    const CaptureHeader& header() const { return header_; }

    /// False once all declared packets have been returned.
    bool next(Packet& out);

private:
    std::string path_;
    CaptureHeader header_;
    std::FILE* f_ = nullptr;
    std::uint32_t read_ = 0;
    std::size_t offset_ = 0;
};

void write_capture(const std::string& path, const SubcarrierGrid& grid, const FrameLayout& layout,
                   const std::vector<Packet>& packets, bool with_meta);

std::vector<Packet> read_capture(const std::string& path, CaptureHeader* header_out = nullptr);

}  // namespace evs
