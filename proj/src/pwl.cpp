#include "brds/pwl.hpp"

#include <cmath>
#include <ostream>

namespace brds::numerics {
namespace {

double act(ActKind kind, double x) {
    return kind == ActKind::sigmoid ? 1.0 / (1.0 + std::exp(-x)) : std::tanh(x);
}

} // namespace

PwlTable build_pwl_table(ActKind kind, int num_segments,
                         double domain_lo, double domain_hi,
                         const FixedSpec& spec) {
    spec.validate();
    config_check(num_segments >= 2, "build_pwl_table: need at least 2 segments");
    config_check(domain_lo < domain_hi, "build_pwl_table: empty domain");

    PwlTable t;
    t.kind = kind;
    t.spec = spec;
    t.domain_lo = domain_lo;
    t.domain_hi = domain_hi;
    t.a_raw.resize(num_segments);
    t.b_raw.resize(num_segments);

    const double width = (domain_hi - domain_lo) / num_segments;
    for (int i = 0; i < num_segments; ++i) {
        const double x0 = domain_lo + i * width;
        const double x1 = domain_lo + (i + 1) * width;
        const double y0 = act(kind, x0);
        const double y1 = act(kind, x1);
        const double slope = (y1 - y0) / (x1 - x0);
        const double intercept = y0 - slope * x0;
        t.a_raw[i] = quantize_raw(slope, spec);
        t.b_raw[i] = quantize_raw(intercept, spec);
    }
    t.out_lo_raw = quantize_raw(kind == ActKind::sigmoid ? 0.0 : -1.0, spec);
    t.out_hi_raw = quantize_raw(1.0, spec);
    return t;
}

std::int32_t pwl_eval_raw(const PwlTable& table, std::int32_t x_raw) {
    const double v = std::ldexp(static_cast<double>(x_raw), -table.spec.frac_bits);
    if (v < table.domain_lo) return table.out_lo_raw;
    if (v >= table.domain_hi) return table.out_hi_raw;

    const int nseg = table.segments();
    const double width = (table.domain_hi - table.domain_lo) / nseg;
    int idx = static_cast<int>(std::floor((v - table.domain_lo) / width));
    if (idx < 0) idx = 0;
    if (idx >= nseg) idx = nseg - 1;

    std::int32_t y = raw_add(raw_mul(table.a_raw[idx], x_raw, table.spec),
                             table.b_raw[idx], table.spec);
    if (y < table.out_lo_raw) y = table.out_lo_raw;
    if (y > table.out_hi_raw) y = table.out_hi_raw;
    return y;
}

void write_pwl_csv(const PwlTable& table, std::ostream& os) {
    os << "segment,a_raw,b_raw\n";
    for (int i = 0; i < table.segments(); ++i)
        os << i << ',' << table.a_raw[i] << ',' << table.b_raw[i] << '\n';
}

} // namespace brds::numerics
