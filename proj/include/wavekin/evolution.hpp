// Explicit Euler integration of dt f = gain - f * theta - 2 nu r^2 f with
// the step size chosen so the per-node depletion can never overshoot zero:
// theta is bounded by 4 (c_v^2/c_gamma) r and the viscous drain by 2 nu r^2,
// so dt <= 1 / max_r(4 (c_v^2/c_gamma) r + 2 nu r^2) keeps every iterate
// nonnegative without clipping. The same depletion rate yields a pointwise
// lower envelope (continuum exponential and its discrete product analogue)
// that runs are checked against.
//
// Alongside the state the stepper keeps a moment ledger: frequency moments,
// the weighted norm that the invariant-set ceiling controls, the ceiling
// c0(t) and floor c1(t) themselves, the worst envelope slack, and the
// membership flags S1 (positivity), S2 (norm ceiling), S3 (mass floor).
// Violations during a run raise flags in the ledger rather than aborting;
// only inadmissible *initial* data is a hard error.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collision.hpp"
#include "derived.hpp"
#include "physics.hpp"
#include "spectrum.hpp"

namespace wavekin {

enum class RunMode { near_resonance, exact_resonance };

struct RunConfig {
    double T = 1.0;            // final time, >= 0 (zero means report-only)
    double dt = 0.0;           // explicit step; 0 derives the step from cfl_safety
    double cfl_safety = 0.9;   // fraction of the positivity-limit step, in (0, 1]
    RunMode mode = RunMode::near_resonance;
    std::size_t record_every = 1;  // ledger cadence in steps
    double order = 2.0;        // moment order N tracked by the ledger
    PhysicalParams params;

    void validate() const {
        params.validate();
        if (!(T >= 0.0)) throw std::invalid_argument("run.T must be >= 0");
        if (!(dt >= 0.0)) throw std::invalid_argument("run.dt must be >= 0");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
            throw std::invalid_argument("run.cfl_safety must lie in (0, 1]");
        }
        if (record_every == 0) throw std::invalid_argument("run.record_every must be >= 1");
        if (!(order >= 0.0)) throw std::invalid_argument("run.N must be >= 0");
    }
};

// Time-dependent admissible set: f stays in S_t while f >= 0 (S1),
// ||f||_{L1_{N+3}} <= c0(t) (S2) and mass >= c1(t) (S3). The ceiling grows
// like e^{c_star t} and the floor decays like e^{-c_upper t}; both rates are
// assembled from the initial data below.
struct InvariantEnvelope {
    double order = 0.0;              // N
    double r0 = 0.0;                 // restriction radius for the mass floor
    double r_lower = 0.0;            // sizes the norm ceiling c0
    double r_upper = 0.0;            // sizes the mass floor c1
    double c_star = 0.0;             // ceiling growth rate
    double c_upper = 0.0;            // floor decay rate, 4 nu r0^2 + 8 r0
    double f0_restricted_mass = 0.0; // initial mass inside radius r0

    double c0(double t) const { return (2.0 * r_lower + 1.0) * std::exp(c_star * t); }
    double c1(double t) const { return (r_upper / 2.0) * std::exp(-c_upper * t); }
};

struct SetFlags {
    bool s1 = false;
    bool s2 = false;
    bool s3 = false;
};

struct LedgerRow {
    double t = 0.0;
    double m0 = 0.0;    // mass
    double m1 = 0.0;    // energy moment
    double mN = 0.0;    // tracked order N
    double mN1 = 0.0;   // N + 1
    double mN2 = 0.0;   // N + 2
    double l1N3 = 0.0;  // ceiling-controlled norm, order N + 3
    double c0 = 0.0;
    double c1 = 0.0;
    double envelope_slack = 0.0;  // min_i (f_i - lower-envelope_i)
    bool s1 = false;
    bool s2 = false;
    bool s3 = false;
    bool trunc_warn = false;  // boundary node carries appreciable N+3 content
};

struct MomentLedger {
    static constexpr const char* csv_header =
        "t,m0,m1,mN,mN1,mN2,l1N3,c0,c1,envelope_slack,s1,s2,s3,trunc_warn";
    std::vector<LedgerRow> rows;
};

// Combined per-node depletion rate: collision attenuation is bounded by
// 4 (c_v^2/c_gamma) r, viscosity drains 2 nu r^2.
inline double depletion_rate(double r, const PhysicalParams& p) {
    return 4.0 * (p.c_v * p.c_v / p.c_gamma) * r + damping_rate(r, p);
}

inline double stable_dt(const RadialGrid& grid, const PhysicalParams& p, double safety) {
    p.validate();
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw std::invalid_argument("safety factor must lie in (0, 1]");
    }
    return safety / depletion_rate(grid.r_max(), p);
}

inline Spectrum envelope_lower(const Spectrum& f0, double t, const PhysicalParams& p) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("envelope time must be >= 0");
    std::vector<double> v(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i) {
        v[i] = f0.values[i] * std::exp(-depletion_rate(f0.grid->nodes[i], p) * t);
    }
    Spectrum env;
    env.grid = f0.grid;
    env.values = std::move(v);
    return env;
}

inline Spectrum discrete_lower_product(const Spectrum& f0, std::span<const double> dt_sequence,
                                       const PhysicalParams& p) {
    p.validate();
    const double dt_max = stable_dt(*f0.grid, p, 1.0);
    for (const double dt : dt_sequence) {
        if (!(dt >= 0.0 && dt <= dt_max * (1.0 + 1e-12))) {
            throw std::invalid_argument("step sequence exceeds the positivity bound");
        }
    }
    Spectrum bound;
    bound.grid = f0.grid;
    bound.values = f0.values;
    for (std::size_t i = 0; i < bound.size(); ++i) {
        const double rate = depletion_rate(f0.grid->nodes[i], p);
        for (const double dt : dt_sequence) bound.values[i] *= 1.0 - dt * rate;
    }
    return bound;
}

// Worst relative shortfall of f against the continuum lower envelope at time
// t; zero when the iterate dominates the envelope outright.
inline double envelope_defect(const Spectrum& f, const Spectrum& f0, double t,
                              const PhysicalParams& p) {
    const Spectrum env = envelope_lower(f0, t, p);
    double defect = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (env.values[i] > 0.0) {
            defect = std::max(defect, (env.values[i] - f.values[i]) / env.values[i]);
        }
    }
    return defect;
}

inline InvariantEnvelope make_envelope(const Spectrum& f0, double order, double T,
                                       const PhysicalParams& p, double r0 = 0.0,
                                       double r_lower = 0.0, double r_upper = 0.0) {
    p.validate();
    if (!(order >= 0.0)) throw std::invalid_argument("envelope order must be >= 0");
    if (!(T >= 0.0)) throw std::invalid_argument("envelope horizon must be >= 0");
    if (!(r0 >= 0.0) || !(r_lower >= 0.0) || !(r_upper >= 0.0)) {
        throw std::invalid_argument("envelope radii and bounds must be >= 0 (0 selects defaults)");
    }
    const double total = mass(f0);
    if (!(total > 0.0)) {
        throw std::invalid_argument("envelope construction needs initial data with positive mass");
    }

    InvariantEnvelope env;
    env.order = order;
    if (r0 > 0.0) {
        env.r0 = r0;
    } else {
        // smallest node radius holding 99 percent of the initial mass
        double cum = 0.0;
        env.r0 = f0.grid->nodes.back();
        for (std::size_t i = 0; i < f0.size(); ++i) {
            cum += f0.grid->volume_weights[i] * f0.values[i];
            if (cum >= 0.99 * total) {
                env.r0 = f0.grid->nodes[i];
                break;
            }
        }
    }
    env.r_lower = r_lower > 0.0 ? r_lower : std::max(1.0 + 1e-9, l1n_norm(f0, order + 3.0, p));
    env.r_upper = r_upper > 0.0 ? r_upper : total;
    env.c_upper = 4.0 * p.nu * env.r0 * env.r0 + 8.0 * env.r0;
    env.f0_restricted_mass = restricted_mass(f0, env.r0);
    if (!(env.f0_restricted_mass > 0.0)) {
        throw std::invalid_argument("no initial mass inside the restriction radius");
    }
    // Ceiling growth: moment-growth rate of the controlled norm, amplified by
    // the worst-case mass-floor decay over the horizon. Clamped below at zero
    // so the ceiling never tightens with time.
    const double kappa = strip_quadrature_factor(*f0.grid);
    const double c0rate = envelope_rate(order + 3.0, p, *f0.grid, kappa);
    env.c_star =
        std::max(0.0, c0rate * (1.0 + std::exp(env.c_upper * T)) / env.f0_restricted_mass);
    return env;
}

inline SetFlags invariant_set_check(const Spectrum& f, double t, const InvariantEnvelope& env,
                                    const PhysicalParams& p) {
    p.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("membership time must be >= 0");
    SetFlags flags;
    flags.s1 = true;
    for (const double v : f.values) {
        if (!(v >= 0.0)) {
            flags.s1 = false;
            break;
        }
    }
    flags.s2 = l1n_norm(*f.grid, f.values, env.order + 3.0, p) <= env.c0(t);
    flags.s3 = mass(f) >= env.c1(t);
    return flags;
}

inline Spectrum step(const Spectrum& f, double dt, const PhysicalParams& p,
                     const TriadTable* table, RunMode mode) {
    p.validate();
    detail::require_nonnegative(f);
    const double dt_max = stable_dt(*f.grid, p, 1.0);
    if (!(dt >= 0.0 && dt <= dt_max * (1.0 + 1e-12))) {
        throw std::invalid_argument("time step exceeds the positivity bound");
    }

    CollisionResult fields;
    if (mode == RunMode::near_resonance) {
        if (table == nullptr) {
            throw std::invalid_argument("near-resonance stepping needs a triad table");
        }
        fields = evaluate(f, p, *table);
    } else {
        fields = evaluate_exact(f, p);
    }

    Spectrum out;
    out.grid = f.grid;
    out.values.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = f.grid->nodes[i];
        out.values[i] = f.values[i]
            + dt * (fields.gain[i] - f.values[i] * fields.theta[i]
                    - damping_rate(r, p) * f.values[i]);
        // Near-resonance attenuation is dominated by the depletion rate, so
        // the update cannot undershoot; the colinear-resonance rate carries
        // no such a priori bound and must be caught here.
        if (out.values[i] < 0.0) {
            if (mode == RunMode::exact_resonance) {
                throw std::runtime_error(
                    "time step too large for the colinear-resonance attenuation");
            }
            assert(false && "positivity lost under the depletion-bounded step");
            out.values[i] = 0.0;
        }
    }
    return out;
}

namespace detail {

// True when the boundary node carries a non-negligible share of the
// ceiling-controlled norm: moments can no longer be trusted to approximate
// their untruncated counterparts.
inline bool truncation_warning(const Spectrum& f, double order, const PhysicalParams& p,
                               double l1N3) {
    if (!(l1N3 > 0.0)) return false;
    const std::size_t last = f.size() - 1;
    const double top = f.grid->volume_weights[last]
        * std::pow(omega(f.grid->nodes[last], p), order + 3.0) * f.values[last];
    return top > 1e-6 * l1N3;
}

inline LedgerRow ledger_row(const Spectrum& f, const Spectrum& f0, double t,
                            const InvariantEnvelope& env, const PhysicalParams& p) {
    LedgerRow row;
    row.t = t;
    row.m0 = mass(f);
    row.m1 = moment(f, 1.0, p);
    row.mN = moment(f, env.order, p);
    row.mN1 = moment(f, env.order + 1.0, p);
    row.mN2 = moment(f, env.order + 2.0, p);
    row.l1N3 = l1n_norm(f, env.order + 3.0, p);
    row.c0 = env.c0(t);
    row.c1 = env.c1(t);
    const Spectrum lower = envelope_lower(f0, t, p);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        slack = std::min(slack, f.values[i] - lower.values[i]);
    }
    row.envelope_slack = slack;
    const SetFlags flags = invariant_set_check(f, t, env, p);
    row.s1 = flags.s1;
    row.s2 = flags.s2;
    row.s3 = flags.s3;
    row.trunc_warn = truncation_warning(f, env.order, p, row.l1N3);
    return row;
}

} // namespace detail

struct RunResult {
    Spectrum final;
    MomentLedger ledger;
};

// Called once per ledger record (including the initial row) with the row and
// the spectrum it was measured from; lets callers dump snapshots in stride
// with the ledger instead of re-running the step loop.
using RecordObserver = std::function<void(const LedgerRow&, const Spectrum&)>;

inline RunResult evolve(const Spectrum& f0, const RunConfig& cfg, const InvariantEnvelope& env,
                        const RecordObserver& on_record = {}) {
    cfg.validate();
    const PhysicalParams& p = cfg.params;

    const SetFlags adm = invariant_set_check(f0, 0.0, env, p);
    if (!(adm.s1 && adm.s2 && adm.s3)) {
        std::string msg = "initial data outside the admissible set:";
        if (!adm.s1) msg += " S1 (positivity)";
        if (!adm.s2) msg += " S2 (norm ceiling)";
        if (!adm.s3) msg += " S3 (mass floor)";
        throw std::invalid_argument(msg);
    }

    const double dt_max = stable_dt(*f0.grid, p, 1.0);
    double dt_base = cfg.dt > 0.0 ? cfg.dt : stable_dt(*f0.grid, p, cfg.cfl_safety);
    if (!(dt_base <= dt_max * (1.0 + 1e-12))) {
        throw std::invalid_argument("run.dt exceeds the positivity bound");
    }

    TriadTable table;
    if (cfg.mode == RunMode::near_resonance && cfg.T > 0.0) {
        table = build_triads(*f0.grid);
    }

    RunResult out;
    out.final = f0;
    out.ledger.rows.push_back(detail::ledger_row(f0, f0, 0.0, env, p));
    if (on_record) on_record(out.ledger.rows.back(), out.final);

    double t = 0.0;
    std::size_t steps = 0;
    while (t < cfg.T - 1e-12 * dt_base) {
        const double dt = std::min(dt_base, cfg.T - t);
        out.final = step(out.final, dt, p, cfg.mode == RunMode::near_resonance ? &table : nullptr,
                         cfg.mode);
        ++steps;
        t += dt;
        const bool last = !(t < cfg.T - 1e-12 * dt_base);
        if (last) t = cfg.T;
        if (last || steps % cfg.record_every == 0) {
            out.ledger.rows.push_back(detail::ledger_row(out.final, f0, t, env, p));
            if (on_record) on_record(out.ledger.rows.back(), out.final);
        }
    }
    return out;
}

} // namespace wavekin
