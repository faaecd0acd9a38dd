// memory_image.hpp — embedded-memory layout of a pruned, quantized model.
//
// Weight memories M_WX / M_WH hold only the stored nonzeros, gate rows
// interleaved f,i,g,o in consecutive 4-row groups: logical row r of gate
// gi lives at group index 4r + gi. Relative addresses mirror the weight
// geometry in M_AdX / M_AdH at w_addr bits per entry. M_B interleaves the
// four bias vectors the same way. Physical rows pack R_x (R_h) entries;
// a logical row spans ceil(k / R) consecutive physical rows.
//
// Sizes follow the closed forms: M_WX = 4H*X_SP*n bits, M_WH = 4H*H_SP*n,
// M_B = 4H*n, M_C = H*n. Input/output memories are replicated across
// dual-port BRAMs (ceil(R_x/2) and ceil(R_h/2) copies); the image keeps
// the replication as metadata but size figures count every copy.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "brds/sparse.hpp"

namespace brds::sparse {

struct ImageGeometry {
    std::uint32_t hidden = 0;   // H
    std::uint32_t input = 0;    // X
    std::uint32_t x_sp = 0;     // stored entries per W_x row
    std::uint32_t h_sp = 0;     // stored entries per W_h row
    std::uint32_t n = 16;       // data width
    std::uint32_t f = 12;       // fraction bits
    std::uint32_t r_x = 1;      // entries per physical row, x side
    std::uint32_t r_h = 1;      // entries per physical row, h side
    std::uint32_t w_addr = 8;   // relative-address width

    void validate() const;
    numerics::FixedSpec spec() const {
        return numerics::FixedSpec{static_cast<int>(n), static_cast<int>(f)};
    }
    bool operator==(const ImageGeometry&) const = default;
};

struct MemoryImage {
    ImageGeometry geo;
    // gate-interleaved logical rows: slot (4r + gate) * k + j
    std::vector<std::int32_t> wx;
    std::vector<std::uint16_t> adx;
    std::vector<std::int32_t> wh;
    std::vector<std::uint16_t> adh;
    std::vector<std::int32_t> bias;  // 4H, f,i,g,o per row group

    // logical bit sizes (the closed-form formulas)
    std::uint64_t bits_wx() const { return 4ull * geo.hidden * geo.x_sp * geo.n; }
    std::uint64_t bits_wh() const { return 4ull * geo.hidden * geo.h_sp * geo.n; }
    std::uint64_t bits_adx() const { return 4ull * geo.hidden * geo.x_sp * geo.w_addr; }
    std::uint64_t bits_adh() const { return 4ull * geo.hidden * geo.h_sp * geo.w_addr; }
    std::uint64_t bits_b() const { return 4ull * geo.hidden * geo.n; }
    std::uint64_t bits_c() const { return static_cast<std::uint64_t>(geo.hidden) * geo.n; }
    std::uint64_t bits_x_per_copy() const { return static_cast<std::uint64_t>(geo.input) * geo.n; }
    std::uint64_t bits_h_per_copy() const { return static_cast<std::uint64_t>(geo.hidden) * geo.n; }
    std::uint32_t mx_copies() const { return (geo.r_x + 1) / 2; }
    std::uint32_t mh_copies() const { return (geo.r_h + 1) / 2; }

    bool operator==(const MemoryImage&) const = default;
};

MemoryImage build_memory_image(const std::array<RowBalancedQ, 4>& wx_set,
                               const std::array<RowBalancedQ, 4>& wh_set,
                               const std::array<lstm::FixedVec, 4>& biases,
                               std::uint32_t r_x, std::uint32_t r_h,
                               std::uint32_t w_addr,
                               const numerics::FixedSpec& spec);

// Encode a quantized model (kept positions from its masks, or nonzeros
// when unmasked) and lay it out.
MemoryImage build_memory_image(const lstm::FixedLstmParams& params,
                               std::uint32_t r_x, std::uint32_t r_h,
                               std::uint32_t w_addr);

struct FetchedRow {
    std::vector<std::int32_t> values;
    std::vector<std::int32_t> cols;
};

enum class WeightSet { wx, wh };

FetchedRow image_fetch_row(const MemoryImage& img, int gate, int logical_row,
                           WeightSet which);

// Round-trip extraction of the stored matrices / biases.
std::array<RowBalancedQ, 4> extract_wx(const MemoryImage& img);
std::array<RowBalancedQ, 4> extract_wh(const MemoryImage& img);
std::array<lstm::FixedVec, 4> extract_biases(const MemoryImage& img);

// Dense fixed model equivalent to the image contents (masks = stored
// positions) — the golden reference input for lstm_step_fixed.
lstm::FixedLstmParams decode_to_params(const MemoryImage& img);

// Binary serialization. Little-endian header
//   magic "BRDS", version u16, then H, X, X_SP, H_SP, n, f, R_x, R_h,
//   w_addr as u32 each,
// followed by the M_WX, M_AdX, M_WH, M_AdH, M_B payloads in that order,
// each packed per physical row and padded to a byte boundary per row.
// Deterministic: equal images serialize to equal bytes.
std::vector<std::uint8_t> serialize_image(const MemoryImage& img);
MemoryImage deserialize_image(const std::vector<std::uint8_t>& bytes);
void write_image(const MemoryImage& img, const std::string& path);
MemoryImage read_image(const std::string& path);

} // namespace brds::sparse
