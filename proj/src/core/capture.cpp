#include "core/capture.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>

#include "core/errors.hpp"

namespace evs {

namespace {

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(buf, bits);
}

void put_cx(std::string& buf, const cx& z) {
    put_f32(buf, static_cast<float>(z.real()));
    put_f32(buf, static_cast<float>(z.imag()));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const unsigned char* p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

std::size_t CaptureHeader::packet_bytes() const {
    std::size_t n = 2;  // label
    if (has_meta()) n += std::size_t(k) * 8 + (std::size_t(n_ltf) + n_df) * 4 + 4;
    n += std::size_t(k) * n_ltf * 8;
    n += std::size_t(k) * n_df * 8;
    return n;
}

CaptureWriter::CaptureWriter(const std::string& path, const CaptureHeader& header)
    : path_(path), tmp_path_(path + ".tmp"), header_(header) {
    f_ = std::fopen(tmp_path_.c_str(), "wb");
    if (!f_) throw IoError("cannot open for writing: " + tmp_path_);
    std::string buf;
    buf.append(CaptureHeader::kMagic, 4);
    put_u16(buf, header_.version);
    put_u16(buf, header_.k);
    put_u16(buf, header_.n_ltf);
    put_u16(buf, header_.n_df);
    put_u32(buf, header_.packet_count);
    put_u16(buf, header_.flags);
    if (std::fwrite(buf.data(), 1, buf.size(), f_) != buf.size()) {
        std::fclose(f_);
        f_ = nullptr;
        throw IoError("short write on " + tmp_path_);
    }
}

CaptureWriter::~CaptureWriter() {
    if (f_) {
        std::fclose(f_);
        std::remove(tmp_path_.c_str());
    }
}

void CaptureWriter::append(const Packet& packet) {
    if (!f_) throw IoError("capture writer already closed");
    if (packet.ltf_rx.rows != header_.k || packet.ltf_rx.cols != header_.n_ltf ||
        packet.df_rx.rows != header_.k || packet.df_rx.cols != header_.n_df)
        throw InvalidInput("capture append: packet shape does not match header");
    if (header_.has_meta() && !packet.meta)
        throw InvalidInput("capture append: header declares metadata but packet has none");

    std::string buf;
    buf.reserve(header_.packet_bytes());
    put_u16(buf, packet.label);
    if (header_.has_meta()) {
        const PacketMeta& m = *packet.meta;
        for (const cx& z : m.true_csi) put_cx(buf, z);
        for (double p : m.rfo_trajectory) put_f32(buf, static_cast<float>(p));
        put_f32(buf, static_cast<float>(m.snr_db));
    }
    for (const cx& z : packet.ltf_rx.v) put_cx(buf, z);
    for (const cx& z : packet.df_rx.v) put_cx(buf, z);

    if (std::fwrite(buf.data(), 1, buf.size(), f_) != buf.size())
        throw IoError("short write on " + tmp_path_);
    ++written_;
}

void CaptureWriter::close() {
    if (closed_) return;
    if (!f_) throw IoError("capture writer already closed");
    if (written_ != header_.packet_count)
        throw InvalidInput("capture close: wrote " + std::to_string(written_) + " packets, header declares " +
                           std::to_string(header_.packet_count));
    if (std::fclose(f_) != 0) {
        f_ = nullptr;
        throw IoError("close failed on " + tmp_path_);
    }
    f_ = nullptr;
    std::error_code ec;
    std::filesystem::rename(tmp_path_, path_, ec);
    if (ec) throw IoError("rename " + tmp_path_ + " -> " + path_ + ": " + ec.message());
    closed_ = true;
}

CaptureReader::CaptureReader(const std::string& path) : path_(path) {
    f_ = std::fopen(path.c_str(), "rb");
    if (!f_) throw IoError("cannot open capture: " + path);

    unsigned char hdr[CaptureHeader::header_bytes()];
    const std::size_t got = std::fread(hdr, 1, sizeof(hdr), f_);
    if (got != sizeof(hdr)) {
        std::fclose(f_);
        f_ = nullptr;
        throw ParseError(path + ": truncated header", got);
    }
    if (std::memcmp(hdr, CaptureHeader::kMagic, 4) != 0) {
        std::fclose(f_);
        f_ = nullptr;
        throw ParseError(path + ": bad magic, not a capture file", 0);
    }
    header_.version = get_u16(hdr + 4);
    header_.k = get_u16(hdr + 6);
    header_.n_ltf = get_u16(hdr + 8);
    header_.n_df = get_u16(hdr + 10);
    header_.packet_count = get_u32(hdr + 12);
    header_.flags = get_u16(hdr + 16);
    offset_ = sizeof(hdr);

    if (header_.version != CaptureHeader::kVersion) {
        std::fclose(f_);
        f_ = nullptr;
        throw ParseError(path + ": unsupported format version " + std::to_string(header_.version), 4);
    }
    if (header_.k == 0 || header_.n_ltf == 0 || header_.n_df == 0) {
        std::fclose(f_);
        f_ = nullptr;
        throw ParseError(path + ": zero dimension in header", 6);
    }

    // Declared counts must match the payload length exactly.
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (!ec) {
        const std::size_t expect =
            CaptureHeader::header_bytes() + header_.packet_bytes() * header_.packet_count;
        if (size != expect) {
            std::fclose(f_);
            f_ = nullptr;
            throw ParseError(path + ": file size " + std::to_string(size) + " does not match declared " +
                                 std::to_string(header_.packet_count) + " packets (" +
                                 std::to_string(expect) + " bytes)",
                             std::min<std::size_t>(size, expect));
        }
    }
}

CaptureReader::~CaptureReader() {
    if (f_) std::fclose(f_);
}

bool CaptureReader::next(Packet& out) {
    if (read_ >= header_.packet_count) return false;
    const std::size_t nbytes = header_.packet_bytes();
    std::vector<unsigned char> buf(nbytes);
    const std::size_t got = std::fread(buf.data(), 1, nbytes, f_);
    if (got != nbytes) throw ParseError(path_ + ": truncated packet", offset_ + got);

    const unsigned char* p = buf.data();
    out.label = get_u16(p);
    p += 2;

    out.meta.reset();
    if (header_.has_meta()) {
        PacketMeta m;
        m.label = out.label;
        m.true_csi.resize(header_.k);
        for (std::size_t i = 0; i < header_.k; ++i) {
            m.true_csi[i] = cx(get_f32(p), get_f32(p + 4));
            p += 8;
        }
        m.rfo_trajectory.resize(std::size_t(header_.n_ltf) + header_.n_df);
        for (double& v : m.rfo_trajectory) {
            v = get_f32(p);
            p += 4;
        }
        m.snr_db = get_f32(p);
        p += 4;
        out.meta = std::move(m);
    }

    out.ltf_rx = CMat(header_.k, header_.n_ltf);
    for (cx& z : out.ltf_rx.v) {
        z = cx(get_f32(p), get_f32(p + 4));
        p += 8;
    }
    out.df_rx = CMat(header_.k, header_.n_df);
    for (cx& z : out.df_rx.v) {
        z = cx(get_f32(p), get_f32(p + 4));
        p += 8;
    }

    offset_ += nbytes;
    ++read_;
    return true;
}

void write_capture(const std::string& path, const SubcarrierGrid& grid, const FrameLayout& layout,
                   const std::vector<Packet>& packets, bool with_meta) {
    CaptureHeader h;
    h.k = static_cast<std::uint16_t>(grid.num_subcarriers());
    h.n_ltf = static_cast<std::uint16_t>(layout.n_ltf);
    h.n_df = static_cast<std::uint16_t>(layout.n_df);
    if (packets.size() > std::numeric_limits<std::uint32_t>::max())
        throw InvalidInput("write_capture: too many packets");
    h.packet_count = static_cast<std::uint32_t>(packets.size());
    h.flags = with_meta ? CaptureHeader::kFlagMeta : 0;
    CaptureWriter w(path, h);
    for (const Packet& p : packets) w.append(p);
    w.close();
}

std::vector<Packet> read_capture(const std::string& path, CaptureHeader* header_out) {
    CaptureReader r(path);
    if (header_out) *header_out = r.header();
    std::vector<Packet> out;
    out.reserve(r.header().packet_count);
    Packet p;
    while (r.next(p)) out.push_back(p);
    return out;
}

}  // namespace evs
