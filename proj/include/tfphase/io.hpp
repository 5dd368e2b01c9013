#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "tfphase/energy.hpp"
#include "tfphase/fields.hpp"

namespace tfp::io {

/// 17-significant-digit decimal rendering used by all CSV output.
std::string format_float17(double v);

/// Binary snapshot: 16-byte header (magic "TFP1", u32-le nx, u32-le ny,
/// u32-le reserved = 0) followed by nx*ny little-endian f64, row-major.
void write_snapshot(const ScalarField2D& u, const std::filesystem::path& path);
ScalarField2D read_snapshot(const std::filesystem::path& path);

/// CSV with header t,E,E_tilde,D_term,stab_term,max_abs_u,mean_u.
void write_energy_csv(const std::vector<EnergyRecord>& records,
                      const std::filesystem::path& path);

/// Streaming variant used by the CLI so partial results survive aborts.
class EnergyCsvWriter {
public:
    explicit EnergyCsvWriter(const std::filesystem::path& path);
    ~EnergyCsvWriter();
    EnergyCsvWriter(const EnergyCsvWriter&) = delete;
    EnergyCsvWriter& operator=(const EnergyCsvWriter&) = delete;
    void append(const EnergyRecord& rec);

private:
    std::FILE* f_ = nullptr;
    std::filesystem::path path_;
};

/// 8-bit binary PGM (P5): u in [-1.05, 1.05] mapped linearly to [0, 255]
/// with round-half-even, clamped outside.
void write_pgm(const ScalarField2D& u, const std::filesystem::path& path);

} // namespace tfp::io
