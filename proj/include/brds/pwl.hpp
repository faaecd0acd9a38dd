// pwl.hpp — piecewise-linear activation tables (sigmoid / tanh).
//
// Uniform segments over [domain_lo, domain_hi]; each segment stores the
// chord coefficients (a, b) of the true function quantized to the working
// fixed-point spec, so an entry is two n-bit words. Evaluation computes
// a*x + b with the standard multiply/add Recovery behavior, clamps to the
// function codomain, and returns the saturating limit value outside the
// domain.
#pragma once

#include <iosfwd>
#include <vector>

#include "brds/fixed_point.hpp"

namespace brds::numerics {

enum class ActKind { sigmoid, tanh };

struct PwlTable {
    ActKind kind = ActKind::sigmoid;
    FixedSpec spec;
    double domain_lo = -8.0;
    double domain_hi = 8.0;
    std::vector<std::int32_t> a_raw;  // per-segment slope
    std::vector<std::int32_t> b_raw;  // per-segment intercept
    std::int32_t out_lo_raw = 0;      // codomain floor == lower tail value
    std::int32_t out_hi_raw = 0;      // codomain ceiling == upper tail value

    int segments() const { return static_cast<int>(a_raw.size()); }
};

PwlTable build_pwl_table(ActKind kind, int num_segments,
                         double domain_lo, double domain_hi,
                         const FixedSpec& spec);

std::int32_t pwl_eval_raw(const PwlTable& table, std::int32_t x_raw);

inline Fixed pwl_eval(const PwlTable& table, const Fixed& x) {
    config_check(x.spec == table.spec, "pwl_eval: spec mismatch");
    return Fixed{pwl_eval_raw(table, x.raw), table.spec};
}

// CSV dump: segment index, a_raw, b_raw.
void write_pwl_csv(const PwlTable& table, std::ostream& os);

} // namespace brds::numerics
