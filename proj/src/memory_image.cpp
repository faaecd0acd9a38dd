#include "brds/memory_image.hpp"

#include <fstream>

namespace brds::sparse {
namespace {

constexpr char kMagic[4] = {'B', 'R', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;

// LSB-first bit packing inside a per-row byte buffer.
class BitPacker {
public:
    explicit BitPacker(std::vector<std::uint8_t>& out) : out_(out) {}

    void begin_row(std::uint32_t row_bits) {
        row_start_ = out_.size();
        out_.resize(row_start_ + (row_bits + 7) / 8, 0);
        bit_ = 0;
    }
    void put(std::uint64_t value, std::uint32_t bits) {
        for (std::uint32_t i = 0; i < bits; ++i, ++bit_) {
            if ((value >> i) & 1)
                out_[row_start_ + (bit_ >> 3)] |= static_cast<std::uint8_t>(1u << (bit_ & 7));
        }
    }

private:
    std::vector<std::uint8_t>& out_;
    std::size_t row_start_ = 0;
    std::uint32_t bit_ = 0;
};

class BitReader {
public:
    BitReader(const std::vector<std::uint8_t>& in, std::size_t offset)
        : in_(in), pos_(offset) {}

    void begin_row(std::uint32_t row_bits) {
        row_start_ = pos_;
        pos_ += (row_bits + 7) / 8;
        data_check(pos_ <= in_.size(), "image: truncated payload");
        bit_ = 0;
    }
    std::uint64_t get(std::uint32_t bits) {
        std::uint64_t v = 0;
        for (std::uint32_t i = 0; i < bits; ++i, ++bit_) {
            if (in_[row_start_ + (bit_ >> 3)] >> (bit_ & 7) & 1) v |= 1ull << i;
        }
        return v;
    }
    std::size_t position() const { return pos_; }

private:
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
    std::size_t row_start_ = 0;
    std::uint32_t bit_ = 0;
};

std::int32_t sign_extend(std::uint64_t v, std::uint32_t bits) {
    const std::uint64_t sign = 1ull << (bits - 1);
    return static_cast<std::int32_t>(static_cast<std::int64_t>((v ^ sign)) - static_cast<std::int64_t>(sign));
}

// Pack `k` entries per logical row into physical rows of `r` entries,
// `width` bits each, one group of logical rows after another.
template <typename T, typename ToBits>
void pack_payload(BitPacker& packer, const std::vector<T>& entries,
                  std::size_t logical_rows, std::uint32_t k, std::uint32_t r,
                  std::uint32_t width, ToBits to_bits) {
    const std::uint32_t row_bits = r * width;
    for (std::size_t lr = 0; lr < logical_rows; ++lr) {
        const T* src = entries.data() + lr * k;
        for (std::uint32_t j = 0; j < k; j += r) {
            packer.begin_row(row_bits);
            const std::uint32_t count = std::min(r, k - j);
            for (std::uint32_t e = 0; e < count; ++e)
                packer.put(to_bits(src[j + e]), width);
        }
    }
}

template <typename T, typename FromBits>
void unpack_payload(BitReader& reader, std::vector<T>& entries,
                    std::size_t logical_rows, std::uint32_t k, std::uint32_t r,
                    std::uint32_t width, FromBits from_bits) {
    const std::uint32_t row_bits = r * width;
    entries.resize(logical_rows * k);
    for (std::size_t lr = 0; lr < logical_rows; ++lr) {
        T* dst = entries.data() + lr * k;
        for (std::uint32_t j = 0; j < k; j += r) {
            reader.begin_row(row_bits);
            const std::uint32_t count = std::min(r, k - j);
            for (std::uint32_t e = 0; e < count; ++e)
                dst[j + e] = from_bits(reader.get(width));
        }
    }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    data_check(pos + 4 <= in.size(), "image: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos++]) << (8 * i);
    return v;
}

} // namespace

void ImageGeometry::validate() const {
    config_check(hidden >= 1 && input >= 1, "image geometry: H and X must be >= 1");
    config_check(n >= 2 && n <= 32 && f < n, "image geometry: bad fixed-point spec");
    config_check(r_x >= 1 && r_h >= 1, "image geometry: R_x and R_h must be >= 1");
    config_check(w_addr >= 1 && w_addr <= 16, "image geometry: w_addr must be in [1,16]");
    config_check(x_sp <= input && h_sp <= hidden, "image geometry: k exceeds matrix width");
}

MemoryImage build_memory_image(const std::array<RowBalancedQ, 4>& wx_set,
                               const std::array<RowBalancedQ, 4>& wh_set,
                               const std::array<lstm::FixedVec, 4>& biases,
                               std::uint32_t r_x, std::uint32_t r_h,
                               std::uint32_t w_addr,
                               const numerics::FixedSpec& spec) {
    spec.validate();
    const int H = wx_set[0].rows;
    const int X = wx_set[0].cols;
    const int x_sp = wx_set[0].k;
    const int h_sp = wh_set[0].k;
    for (int g = 0; g < 4; ++g) {
        data_check(wx_set[g].rows == H && wx_set[g].cols == X && wx_set[g].k == x_sp,
                   "build_memory_image: W_x set is not uniform");
        data_check(wh_set[g].rows == H && wh_set[g].cols == H && wh_set[g].k == h_sp,
                   "build_memory_image: W_h set is not uniform");
        data_check(static_cast<int>(biases[g].size()) == H,
                   "build_memory_image: bias length mismatch");
    }

    MemoryImage img;
    img.geo = ImageGeometry{static_cast<std::uint32_t>(H), static_cast<std::uint32_t>(X),
                            static_cast<std::uint32_t>(x_sp), static_cast<std::uint32_t>(h_sp),
                            static_cast<std::uint32_t>(spec.width_bits),
                            static_cast<std::uint32_t>(spec.frac_bits),
                            r_x, r_h, w_addr};
    img.geo.validate();

    const std::uint32_t max_rel = (w_addr >= 16) ? 0xFFFF
                                : ((1u << w_addr) - 1);
    const auto interleave = [&](const std::array<RowBalancedQ, 4>& set, int k,
                                std::vector<std::int32_t>& w_out,
                                std::vector<std::uint16_t>& a_out) {
        w_out.resize(static_cast<std::size_t>(4) * H * k);
        a_out.resize(static_cast<std::size_t>(4) * H * k);
        for (int r = 0; r < H; ++r) {
            for (int g = 0; g < 4; ++g) {
                const std::size_t dst = (static_cast<std::size_t>(4) * r + g) * k;
                for (int j = 0; j < k; ++j) {
                    const std::uint16_t rel = set[g].row_rel(r)[j];
                    data_check(rel <= max_rel,
                               "build_memory_image: relative index overflows w_addr");
                    w_out[dst + j] = set[g].row_values(r)[j];
                    a_out[dst + j] = rel;
                }
            }
        }
    };
    interleave(wx_set, x_sp, img.wx, img.adx);
    interleave(wh_set, h_sp, img.wh, img.adh);

    img.bias.resize(static_cast<std::size_t>(4) * H);
    for (int r = 0; r < H; ++r)
        for (int g = 0; g < 4; ++g)
            img.bias[static_cast<std::size_t>(4) * r + g] = biases[g][r];
    return img;
}

MemoryImage build_memory_image(const lstm::FixedLstmParams& params,
                               std::uint32_t r_x, std::uint32_t r_h,
                               std::uint32_t w_addr) {
    std::array<RowBalancedQ, 4> wx, wh;
    for (int g = 0; g < 4; ++g) {
        wx[g] = encode_row_balanced(params.w_x[g]);
        wh[g] = encode_row_balanced(params.w_h[g]);
    }
    return build_memory_image(wx, wh, params.b, r_x, r_h, w_addr, params.spec);
}

FetchedRow image_fetch_row(const MemoryImage& img, int gate, int logical_row,
                           WeightSet which) {
    data_check(gate >= 0 && gate < 4, "image_fetch_row: gate out of range");
    data_check(logical_row >= 0 && logical_row < static_cast<int>(img.geo.hidden),
               "image_fetch_row: row out of range");
    const int k = static_cast<int>(which == WeightSet::wx ? img.geo.x_sp : img.geo.h_sp);
    const int cols = static_cast<int>(which == WeightSet::wx ? img.geo.input : img.geo.hidden);
    const auto& w = which == WeightSet::wx ? img.wx : img.wh;
    const auto& a = which == WeightSet::wx ? img.adx : img.adh;
    const std::size_t base = (static_cast<std::size_t>(4) * logical_row + gate) * k;

    FetchedRow out;
    out.values.assign(w.begin() + base, w.begin() + base + k);
    out.cols = address_decode(a.data() + base, k);
    if (k > 0)
        data_check(out.cols.back() < cols, "image_fetch_row: corrupt image (column overflow)");
    return out;
}

namespace {

std::array<RowBalancedQ, 4> extract_set(const MemoryImage& img, WeightSet which) {
    const int H = static_cast<int>(img.geo.hidden);
    const int k = static_cast<int>(which == WeightSet::wx ? img.geo.x_sp : img.geo.h_sp);
    const int cols = static_cast<int>(which == WeightSet::wx ? img.geo.input : img.geo.hidden);
    const auto& w = which == WeightSet::wx ? img.wx : img.wh;
    const auto& a = which == WeightSet::wx ? img.adx : img.adh;

    std::array<RowBalancedQ, 4> set;
    for (int g = 0; g < 4; ++g) {
        set[g].rows = H;
        set[g].cols = cols;
        set[g].k = k;
        set[g].values.resize(static_cast<std::size_t>(H) * k);
        set[g].rel.resize(static_cast<std::size_t>(H) * k);
        for (int r = 0; r < H; ++r) {
            const std::size_t src = (static_cast<std::size_t>(4) * r + g) * k;
            const std::size_t dst = static_cast<std::size_t>(r) * k;
            for (int j = 0; j < k; ++j) {
                set[g].values[dst + j] = w[src + j];
                set[g].rel[dst + j] = a[src + j];
            }
        }
    }
    return set;
}

} // namespace

std::array<RowBalancedQ, 4> extract_wx(const MemoryImage& img) {
    return extract_set(img, WeightSet::wx);
}

std::array<RowBalancedQ, 4> extract_wh(const MemoryImage& img) {
    return extract_set(img, WeightSet::wh);
}

std::array<lstm::FixedVec, 4> extract_biases(const MemoryImage& img) {
    const int H = static_cast<int>(img.geo.hidden);
    std::array<lstm::FixedVec, 4> biases;
    for (int g = 0; g < 4; ++g) {
        biases[g].resize(H);
        for (int r = 0; r < H; ++r)
            biases[g][r] = img.bias[static_cast<std::size_t>(4) * r + g];
    }
    return biases;
}

lstm::FixedLstmParams decode_to_params(const MemoryImage& img) {
    lstm::FixedLstmParams p;
    p.dims = lstm::LstmDims{static_cast<int>(img.geo.input), static_cast<int>(img.geo.hidden)};
    p.spec = img.geo.spec();
    const auto wx = extract_wx(img);
    const auto wh = extract_wh(img);
    for (int g = 0; g < 4; ++g) {
        p.w_x[g] = decode(wx[g]);
        p.w_h[g] = decode(wh[g]);
    }
    p.b = extract_biases(img);
    return p;
}

std::vector<std::uint8_t> serialize_image(const MemoryImage& img) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(static_cast<std::uint8_t>(kVersion & 0xFF));
    out.push_back(static_cast<std::uint8_t>(kVersion >> 8));
    for (std::uint32_t v : {img.geo.hidden, img.geo.input, img.geo.x_sp, img.geo.h_sp,
                            img.geo.n, img.geo.f, img.geo.r_x, img.geo.r_h, img.geo.w_addr})
        put_u32(out, v);

    const std::uint64_t n_mask = img.geo.n >= 64 ? ~0ull : ((1ull << img.geo.n) - 1);
    BitPacker packer(out);
    const std::size_t rows4h = static_cast<std::size_t>(4) * img.geo.hidden;
    pack_payload(packer, img.wx, rows4h, img.geo.x_sp, img.geo.r_x, img.geo.n,
                 [&](std::int32_t v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) & n_mask; });
    pack_payload(packer, img.adx, rows4h, img.geo.x_sp, img.geo.r_x, img.geo.w_addr,
                 [](std::uint16_t v) { return static_cast<std::uint64_t>(v); });
    pack_payload(packer, img.wh, rows4h, img.geo.h_sp, img.geo.r_h, img.geo.n,
                 [&](std::int32_t v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) & n_mask; });
    pack_payload(packer, img.adh, rows4h, img.geo.h_sp, img.geo.r_h, img.geo.w_addr,
                 [](std::uint16_t v) { return static_cast<std::uint64_t>(v); });
    pack_payload(packer, img.bias, rows4h, 1, 1, img.geo.n,
                 [&](std::int32_t v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) & n_mask; });
    return out;
}

MemoryImage deserialize_image(const std::vector<std::uint8_t>& bytes) {
    data_check(bytes.size() >= 6 + 9 * 4, "image: file too short");
    data_check(std::equal(kMagic, kMagic + 4, bytes.begin()), "image: bad magic");
    const std::uint16_t version =
        static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
    data_check(version == kVersion, "image: unsupported version");

    std::size_t pos = 6;
    MemoryImage img;
    img.geo.hidden = get_u32(bytes, pos);
    img.geo.input = get_u32(bytes, pos);
    img.geo.x_sp = get_u32(bytes, pos);
    img.geo.h_sp = get_u32(bytes, pos);
    img.geo.n = get_u32(bytes, pos);
    img.geo.f = get_u32(bytes, pos);
    img.geo.r_x = get_u32(bytes, pos);
    img.geo.r_h = get_u32(bytes, pos);
    img.geo.w_addr = get_u32(bytes, pos);
    img.geo.validate();

    const std::uint32_t n = img.geo.n;
    BitReader reader(bytes, pos);
    const std::size_t rows4h = static_cast<std::size_t>(4) * img.geo.hidden;
    unpack_payload(reader, img.wx, rows4h, img.geo.x_sp, img.geo.r_x, n,
                   [&](std::uint64_t v) { return sign_extend(v, n); });
    unpack_payload(reader, img.adx, rows4h, img.geo.x_sp, img.geo.r_x, img.geo.w_addr,
                   [](std::uint64_t v) { return static_cast<std::uint16_t>(v); });
    unpack_payload(reader, img.wh, rows4h, img.geo.h_sp, img.geo.r_h, n,
                   [&](std::uint64_t v) { return sign_extend(v, n); });
    unpack_payload(reader, img.adh, rows4h, img.geo.h_sp, img.geo.r_h, img.geo.w_addr,
                   [](std::uint64_t v) { return static_cast<std::uint16_t>(v); });
    unpack_payload(reader, img.bias, rows4h, 1, 1, n,
                   [&](std::uint64_t v) { return sign_extend(v, n); });
    data_check(reader.position() == bytes.size(), "image: trailing bytes");

    // reject images whose decoded columns overflow the matrix width
    for (int g = 0; g < 4; ++g) {
        for (std::uint32_t r = 0; r < img.geo.hidden; ++r) {
            image_fetch_row(img, g, static_cast<int>(r), WeightSet::wx);
            image_fetch_row(img, g, static_cast<int>(r), WeightSet::wh);
        }
    }
    return img;
}

void write_image(const MemoryImage& img, const std::string& path) {
    const auto bytes = serialize_image(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    data_check(out.good(), "write_image: cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    data_check(out.good(), "write_image: write failed for " + path);
}

MemoryImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    data_check(in.good(), "read_image: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_image(bytes);
}

} // namespace brds::sparse
