#include "tfphase/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tfp::io {

namespace {

[[noreturn]] void io_fail(const std::string& op, const std::filesystem::path& path) {
    throw std::runtime_error(op + " failed for '" + path.string() + "'");
}

void put_u32_le(std::ostream& os, std::uint32_t v) {
    const std::array<unsigned char, 4> b = {
        static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32_le(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64_le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

double get_f64_le(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

std::string format_float17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_snapshot(const ScalarField2D& u, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) io_fail("open for write", path);
    os.write("TFP1", 4);
    put_u32_le(os, static_cast<std::uint32_t>(u.grid().nx));
    put_u32_le(os, static_cast<std::uint32_t>(u.grid().ny));
    put_u32_le(os, 0);
    for (const double v : u.values()) put_f64_le(os, v);
    if (!os) io_fail("write", path);
}

ScalarField2D read_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) io_fail("open for read", path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TFP1", 4) != 0)
        throw std::runtime_error("'" + path.string() + "' is not a TFP1 snapshot");
    const std::uint32_t nx = get_u32_le(is);
    const std::uint32_t ny = get_u32_le(is);
    (void)get_u32_le(is); // reserved
    // snapshots carry no domain geometry; callers that need lengths rebind the grid
    GridDescriptor g(static_cast<int>(nx), static_cast<int>(ny), 1.0, 1.0);
    ScalarField2D u(g);
    for (double& v : u.values()) v = get_f64_le(is);
    if (!is) io_fail("read", path);
    return u;
}

namespace {

constexpr char kCsvHeader[] = "t,E,E_tilde,D_term,stab_term,max_abs_u,mean_u\n";

std::string csv_row(const EnergyRecord& r) {
    std::string row;
    row.reserve(8 * 26);
    row += format_float17(r.t);
    for (const double v : {r.E, r.E_tilde, r.D_term, r.stab_term, r.max_abs_u, r.mean_u}) {
        row += ',';
        row += format_float17(v);
    }
    row += '\n';
    return row;
}

} // namespace

void write_energy_csv(const std::vector<EnergyRecord>& records,
                      const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) io_fail("open for write", path);
    os << kCsvHeader;
    for (const auto& r : records) os << csv_row(r);
    if (!os) io_fail("write", path);
}

EnergyCsvWriter::EnergyCsvWriter(const std::filesystem::path& path) : path_(path) {
    f_ = std::fopen(path.string().c_str(), "w");
    if (!f_) io_fail("open for write", path);
    std::fputs(kCsvHeader, f_);
    std::fflush(f_);
}

EnergyCsvWriter::~EnergyCsvWriter() {
    if (f_) std::fclose(f_);
}

void EnergyCsvWriter::append(const EnergyRecord& rec) {
    if (std::fputs(csv_row(rec).c_str(), f_) == EOF) io_fail("write", path_);
    std::fflush(f_);
}

void write_pgm(const ScalarField2D& u, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) io_fail("open for write", path);
    os << "P5\n" << u.grid().nx << " " << u.grid().ny << "\n255\n";
    std::vector<unsigned char> row(u.grid().nx);
    // PGM rows scan y downward so images match the usual orientation
    for (int j = u.grid().ny - 1; j >= 0; --j) {
        for (int i = 0; i < u.grid().nx; ++i) {
            const double scaled = (u(i, j) + 1.05) / 2.1 * 255.0;
            const double clamped = std::fmin(255.0, std::fmax(0.0, scaled));
            row[i] = static_cast<unsigned char>(std::nearbyint(clamped));
        }
        os.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!os) io_fail("write", path);
}

} // namespace tfp::io
