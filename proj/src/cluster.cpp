#include "ale/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <queue>

#include "ale/parallel.hpp"

namespace ale {

void SimParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw config_error("c must be positive");
    if (c > 0.5) throw config_error("c > 0.5 is outside the model's working range");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw config_error("nu must be >= 0");
    if (!(alpha >= 0.0)) throw config_error("alpha must be >= 0");
    if (!(T >= 0.0) || !std::isfinite(T)) throw config_error("T must be a nonnegative finite real");
    if (!(sigma_exponent > 0.0)) throw config_error("sigma_exponent must be positive");
    if (sigma() < 1e-200) throw config_error("sigma underflows the working range");
    if (grid_coarse < 16) throw config_error("grid.coarse must be >= 16");
    if (grid_depth < 1) throw config_error("grid.depth must be >= 1");
    if (!(grid_window > 0.0) || grid_window > 0.45) throw config_error("grid.window must be in (0, 0.45]");
    if (nu <= 2.0 && nu > 0.0) {
        std::fprintf(stderr, "warning: nu = %g is outside the concentrating phase (nu > 2)\n", nu);
    }
}

AnchoredAngle ClusterState::pole(int sign) const {
    const AnchoredAngle& tn = angles.back();
    const double bn = part.back().beta;
    if (part.back().c == params.c) {
        return tn.add_steps(sign >= 0 ? 1 : -1);
    }
    return tn.add_offset(sign >= 0 ? bn : -bn, unit());
}

AnchoredAngle ClusterState::perp(std::size_t k) const {
    const AnchoredAngle& tk = angles[k - 1];
    const double bk = part[k - 1].beta;
    const int s = top_sign[k]; // s_{k+1}
    if (part[k - 1].c == params.c) {
        return tk.add_steps(s > 0 ? -1 : 1);
    }
    return tk.add_offset(s > 0 ? -bk : bk, unit());
}

ClusterState new_cluster(const SimParams& config) {
    config.validate();
    ClusterState st;
    st.params = config;
    st.base = params_from_capacity(config.c);
    st.d_stat = config.d_stat > 0.0 ? config.d_stat : 0.25 * st.base.beta;
    st.l_practical = 1e-3 * st.base.beta;
    return st;
}

ClusterState ideal_cluster(const SimParams& config, const std::vector<int>& signs) {
    ClusterState st = new_cluster(config);
    AnchoredAngle theta{0, 0.0, 0.0};
    st = append_particle(std::move(st), theta, config.c);
    for (int s : signs) {
        theta = theta.add_steps(s > 0 ? 1 : -1);
        st = append_particle(std::move(st), theta, config.c);
    }
    return st;
}

ClusterState append_particle(ClusterState state, const AnchoredAngle& theta, double cap) {
    if (!(cap > 0.0)) throw domain_error("append_particle: capacity must be positive");
    const std::size_t n = state.size();
    const double unit = state.unit();
    const SlitParams pnew = cap == state.params.c ? state.base : params_from_capacity(cap);

    int sign = 0;
    double res = 0.0;
    if (n >= 1) {
        const AnchoredAngle& prev = state.angles.back();
        const double bn = state.part.back().beta;
        const std::int64_t dm = theta.m - prev.m;
        const double dr = (theta.r - prev.r) + (theta.base - prev.base);
        double dplus, dminus, res_plus, res_minus;
        if (state.part.back().c == state.params.c) {
            res_plus = static_cast<double>(dm - 1) * unit + dr;
            res_minus = static_cast<double>(dm + 1) * unit + dr;
        } else {
            res_plus = static_cast<double>(dm) * unit + dr - bn;
            res_minus = static_cast<double>(dm) * unit + dr + bn;
        }
        dplus = std::abs(res_plus);
        dminus = std::abs(res_minus);
        sign = dplus <= dminus ? 1 : -1;
        res = sign > 0 ? res_plus : res_minus;
        if (!state.stopped_at && std::min(dplus, dminus) > state.d_stat) {
            state.stopped_at = n + 1;
        }
    }

    const double tval = theta.value(unit);
    const cplx r = unit_rot(tval);
    const cplx trot = unit_rot(tval - res);

    state.angles.push_back(theta);
    state.caps.push_back(cap);
    state.part.push_back(pnew);
    state.top_sign.push_back(sign);
    state.resid.push_back(res);
    state.rot.push_back(r);
    state.top_rot.push_back(trot);
    state.mismatch.push_back(n >= 1 ? trot * expim1(res) : cplx{0.0, 0.0});
    state.total_capacity += cap;
    return state;
}

cplx phi_apply(const ClusterState& state, cplx w) {
    if (std::norm(w) < 1.0 - 2e-12) throw domain_error("phi_apply: |w| < 1");
    cplx z = w;
    for (std::size_t k = state.size(); k >= 1; --k) {
        const cplx zl = std::conj(state.rot[k - 1]) * z;
        z = state.rot[k - 1] * slit_map(zl, state.part[k - 1]);
        if (std::norm(z) < 1.0 - 2e-9) throw domain_error("phi_apply: intermediate left the exterior disc");
    }
    return z;
}

cplx phi_partial_apply(const ClusterState& state, std::size_t j, cplx w) {
    if (j > state.size()) throw domain_error("phi_partial_apply: index out of range");
    cplx z = w;
    for (std::size_t k = state.size(); k > j; --k) {
        const cplx zl = std::conj(state.rot[k - 1]) * z;
        z = state.rot[k - 1] * slit_map(zl, state.part[k - 1]);
    }
    return z;
}

namespace {

struct ScalarChain {
    bool offset_mode = false;
    cplx delta;       // offset from e^{iA} while anchored
    cplx anchor_rot;  // e^{iA}
    int sign = 0;     // s for the map about to be applied
    cplx z;           // absolute point otherwise
    double mant = 1.0;
    long ex2 = 0;
    bool pole_hit = false;

    void accumulate(double factor) {
        if (!(factor > 0.0) || !std::isfinite(factor)) {
            pole_hit = true;
            return;
        }
        mant *= factor;
        if (mant < 1e-140 || mant > 1e140) {
            int e;
            mant = std::frexp(mant, &e);
            ex2 += e;
        }
    }

    // apply f_k
    void step(const ClusterState& state, std::size_t k, std::vector<cplx>* offsets_out) {
        const SlitParams& p = state.part[k - 1];
        if (offset_mode && std::abs(delta) > 0.45 * p.beta) to_absolute();
        if (offset_mode) {
            cplx dl = std::conj(state.rot[k - 1]) * delta;
            SlitOffsetEval ev;
            if (sign > 0) {
                ev = slit_offset_eval(dl, p);
            } else {
                ev = slit_offset_eval(std::conj(dl), p);
                ev.image_offset = std::conj(ev.image_offset);
            }
            accumulate(ev.fprime_sq);
            // offset from the next anchor e^{i theta_top_k} (theta_1 for k = 1)
            delta = state.rot[k - 1] * ev.image_offset + state.mismatch[k - 1];
            anchor_rot = state.top_rot[k - 1];
            sign = state.top_sign[k - 1];
            if (offsets_out) offsets_out->push_back(delta);
        } else {
            const cplx zl = std::conj(state.rot[k - 1]) * z;
            const SlitEval ev = slit_eval(zl, p);
            accumulate(ev.fprime_sq);
            z = state.rot[k - 1] * ev.image;
            if (offsets_out) offsets_out->push_back(z - state.top_rot[k - 1]);
        }
    }

    void to_absolute() {
        if (!offset_mode) return;
        z = anchor_rot + delta;
        offset_mode = false;
    }

    double log_value() const {
        return 0.5 * (std::log(mant) + static_cast<double>(ex2) * 0.6931471805599453);
    }
};

} // namespace

ChainResult chain_eval(const ClusterState& state, bool anchored, int pole_sign, cplx delta0,
                       cplx w_abs, std::vector<cplx>* offsets_out) {
    const std::size_t n = state.size();
    ChainResult out;
    if (n == 0) return out;

    ScalarChain cs;
    cs.offset_mode = anchored;
    cs.delta = delta0;
    cs.z = w_abs;
    cs.sign = pole_sign;
    if (anchored) cs.anchor_rot = unit_rot(state.pole(pole_sign).value(state.unit()));

    for (std::size_t k = n; k >= 1; --k) cs.step(state, k, offsets_out);
    out.pole_hit = cs.pole_hit;
    if (!cs.pole_hit) out.log_phi_prime = cs.log_value();
    return out;
}

void ChainBatch::resize(std::size_t m) {
    zr.assign(m, 0.0);
    zi.assign(m, 0.0);
    mant.assign(m, 1.0);
    ex2.assign(m, 0);
    offset_mode.assign(m, 0);
    delta.assign(m, cplx{});
    anchor_rot.assign(m, cplx{});
    sign.assign(m, 0);
}

void batch_init_anchored(ChainBatch& batch, std::size_t i, const ClusterState& state, int pole_sign,
                         cplx delta0) {
    batch.offset_mode[i] = 1;
    batch.delta[i] = delta0;
    batch.anchor_rot[i] = unit_rot(state.pole(pole_sign).value(state.unit()));
    batch.sign[i] = static_cast<std::int8_t>(pole_sign);
}

void batch_init_absolute(ChainBatch& batch, std::size_t i, cplx w) {
    batch.offset_mode[i] = 0;
    batch.zr[i] = w.real();
    batch.zi[i] = w.imag();
}

namespace {

// Branchless absolute step over a contiguous cell range for one particle.
// Identical arithmetic regardless of worker count or batch partitioning.
void absolute_batch_step(double cr, double ci, const SlitParams& p, double* zr, double* zi,
                         double* mant, std::size_t lo, std::size_t hi) {
    const double a2 = p.a_sq;
    const double ec = p.ec;
    const double emch = p.emch;
    const double er = p.e_ibeta.real();
    const double ei = p.e_ibeta.imag();
    for (std::size_t i = lo; i < hi; ++i) {
        const double xr = cr * zr[i] + ci * zi[i]; // zl = conj(rot) z
        const double xi = cr * zi[i] - ci * zr[i];
        const double t1r = xr + 1.0, t1i = xi;     // zl + 1
        const double den = t1r * t1r + t1i * t1i;
        const double inv_den = 1.0 / den;
        const double nzl = xr * xr + xi * xi;
        const double zeta_r = -2.0 * xi * inv_den; // zeta = i (zl-1)/(zl+1)
        const double zeta_i = (nzl - 1.0) * inv_den;
        double ur = zeta_r * zeta_r - zeta_i * zeta_i - a2;
        double ui = 2.0 * zeta_r * zeta_i;
        // boundary-collapsed inputs: resolve the cut side as the limit from
        // inside the exterior disc (sign of Re zeta)
        const double noise = 1e-13 * (1.0 + std::fabs(zeta_r));
        ui = std::fabs(zeta_i) <= noise ? std::copysign(1e-200, zeta_r) : ui;
        const double ru = std::sqrt(ur * ur + ui * ui);
        const double tt = std::sqrt(0.5 * (ru + std::fabs(ur)));
        const double qq = 0.5 * ui / tt;
        double rr = ur >= 0.0 ? tt : std::fabs(qq);
        double ri = ur >= 0.0 ? qq : std::copysign(tt, ui);
        const double flip = ri < 0.0 ? -1.0 : 1.0; // root in the closed UHP
        rr *= flip;
        ri *= flip;
        const double zpr = emch * rr, zpi = emch * ri;
        const double qr = -(zpi * t1r + zpr * t1i); // i zp (zl+1)
        const double qi = zpr * t1r - zpi * t1i;
        const double gr = t1r - qr, gi = t1i - qi;
        const double g2r = gr * gr - gi * gi, g2i = 2.0 * gr * gi;
        const double inv_nzl = 1.0 / nzl;
        const double fr = 0.25 * ec * (g2r * xr + g2i * xi) * inv_nzl; // f = ec g^2 conj(zl)/(4 nzl)
        const double fi = 0.25 * ec * (g2i * xr - g2r * xi) * inv_nzl;
        const double n_im = fr * fr + fi * fi;
        const double w1r = xr - 1.0;
        const double n_w1 = w1r * w1r + xi * xi;
        const double dpr = xr - er, dpi = xi - ei;
        const double dmi = xi + ei;
        const double n_dp = dpr * dpr + dpi * dpi;
        const double n_dm = dpr * dpr + dmi * dmi;
        const double factor = n_im * n_w1 / (nzl * std::sqrt(n_dp * n_dm));
        zr[i] = cr * fr - ci * fi;
        zi[i] = cr * fi + ci * fr;
        mant[i] *= factor;
    }
}

// Pull the base-2 exponent out of every mantissa (branchless, so the step
// loop above stays vectorizable).  Zero and non-finite values pass through
// untouched and are diagnosed at the end of the chain.
void renormalize_batch(double* mant, int* ex2, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
        const double m = mant[i];
        std::uint64_t bits;
        std::memcpy(&bits, &m, sizeof(bits));
        const int raw = static_cast<int>((bits >> 52) & 0x7FFu);
        const bool normal = raw != 0 && raw != 0x7FF;
        const int e = normal ? raw - 1023 : 0;
        const std::uint64_t rebased = (bits & ~(0x7FFull << 52)) | (1023ull << 52);
        double m2;
        std::memcpy(&m2, &rebased, sizeof(m2));
        mant[i] = normal ? m2 : m;
        ex2[i] += e;
    }
}

} // namespace

void batch_chain_run(const ClusterState& state, ChainBatch& batch, std::vector<double>& out) {
    const std::size_t n = state.size();
    const std::size_t m = batch.size();
    out.assign(m, 0.0);
    if (n == 0) return;

    // scalar head: run enough levels that every anchored entry has crossed
    // into the absolute regime; offsets grow like |d|^{2^-j}, so any offset
    // above the sigma floor is absolute within ~6 levels
    const std::size_t head = std::min<std::size_t>(n, 8);
    parallel_for(m, [&](std::size_t i) {
        ScalarChain cs;
        cs.offset_mode = batch.offset_mode[i] != 0;
        cs.delta = batch.delta[i];
        cs.anchor_rot = batch.anchor_rot[i];
        cs.sign = batch.sign[i];
        cs.z = {batch.zr[i], batch.zi[i]};
        for (std::size_t k = n; k > n - head; --k) cs.step(state, k, nullptr);
        cs.to_absolute();
        if (cs.pole_hit) {
            batch.mant[i] = 0.0;
        } else {
            batch.zr[i] = cs.z.real();
            batch.zi[i] = cs.z.imag();
            batch.mant[i] = cs.mant;
            batch.ex2[i] = static_cast<int>(cs.ex2);
        }
    });

    // batched absolute tail, particle-outer, cells-inner; mantissa exponents
    // are pulled out every few levels so the step loop stays branch-free
    if (n > head) {
        const unsigned workers = std::min<unsigned>(thread_count(), 8);
        auto run_chunk = [&](std::size_t lo, std::size_t hi) {
            if (lo >= hi) return;
            std::size_t since_renorm = 0;
            for (std::size_t k = n - head; k >= 1; --k) {
                const cplx r = state.rot[k - 1];
                absolute_batch_step(r.real(), r.imag(), state.part[k - 1], batch.zr.data(),
                                    batch.zi.data(), batch.mant.data(), lo, hi);
                if (++since_renorm == 4 || k == 1) {
                    renormalize_batch(batch.mant.data(), batch.ex2.data(), lo, hi);
                    since_renorm = 0;
                }
            }
        };
        if (workers <= 1) {
            run_chunk(0, m);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (m + workers - 1) / workers;
            for (unsigned t = 0; t < workers; ++t) {
                const std::size_t lo = t * chunk;
                const std::size_t hi = std::min(m, lo + chunk);
                if (lo < hi) pool.emplace_back(run_chunk, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        const double mm = batch.mant[i];
        if (!(mm > 0.0) || !std::isfinite(mm)) {
            out[i] = std::numeric_limits<double>::quiet_NaN();
        } else {
            out[i] = 0.5 * (std::log(mm) + static_cast<double>(batch.ex2[i]) * 0.6931471805599453);
        }
    }
}

double log_abs_phi_prime(const ClusterState& state, cplx w) {
    if (std::norm(w) < 1.0 - 2e-12) throw domain_error("log_abs_phi_prime: |w| < 1");
    ChainResult r = chain_eval(state, false, 0, {}, w, nullptr);
    if (r.pole_hit) throw pole_error("log_abs_phi_prime: pole distance underflowed");
    return r.log_phi_prime;
}

double log_abs_phi_prime(const ClusterState& state, int pole_sign, cplx delta) {
    if (state.size() == 0) return 0.0;
    ChainResult r;
    if (std::abs(delta) <= state.l_practical) {
        r = chain_eval(state, true, pole_sign, delta, {}, nullptr);
    } else {
        const cplx w = unit_rot(state.pole(pole_sign).value(state.unit())) + delta;
        r = chain_eval(state, false, 0, {}, w, nullptr);
    }
    if (r.pole_hit) throw pole_error("log_abs_phi_prime: pole distance underflowed");
    return r.log_phi_prime;
}

std::vector<cplx> offset_chain(const ClusterState& state, int pole_sign, cplx delta0) {
    if (state.size() == 0) throw domain_error("offset_chain: empty cluster");
    if (state.stopped()) throw domain_error("offset_chain: state is stopped");
    if (std::abs(delta0) > state.l_practical) {
        throw out_of_regime_error("offset_chain: |delta0| > L_practical");
    }
    std::vector<cplx> offsets;
    offsets.reserve(state.size());
    // the point chain is exact even when a pole distance underflows (the
    // boundary limit delta0 = 0 maps pole to pole), so pole hits are ignored
    chain_eval(state, true, pole_sign, delta0, {}, &offsets);
    return offsets;
}

Basepoints basepoints(const ClusterState& state) {
    const std::size_t n = state.size();
    if (n < 1) throw domain_error("basepoints: need at least one particle");
    if (state.stopped()) throw domain_error("basepoints: state is stopped");
    Basepoints out;
    out.pole_plus = unit_rot(state.pole(+1).value(state.unit()));
    out.pole_minus = unit_rot(state.pole(-1).value(state.unit()));
    out.zhat.resize(n >= 1 ? n - 1 : 0);
    for (std::size_t j = 1; j + 1 <= n; ++j) {
        const double start_angle = state.perp(j).value(state.unit());
        cplx z = std::exp(cplx{kRadialLift, 0.0}) * unit_rot(start_angle);
        bool ok = true;
        for (std::size_t k = j + 1; k <= n; ++k) {
            const cplx zl = std::conj(state.rot[k - 1]) * z;
            try {
                z = state.rot[k - 1] * slit_map_inverse(zl, state.part[k - 1]);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
        }
        if (ok) out.zhat[j - 1] = z / std::abs(z);
    }
    return out;
}

std::vector<cplx> boundary_trace(const ClusterState& state, int points_per_particle) {
    const std::size_t n = state.size();
    std::vector<double> mesh;
    if (n == 0) {
        std::vector<cplx> circle;
        for (int i = 0; i <= 256; ++i) circle.push_back(unit_rot(-kPi + kTwoPi * i / 256.0));
        return circle;
    }
    const std::size_t target = std::max<std::size_t>(1024, static_cast<std::size_t>(points_per_particle) * n);
    const std::size_t budget = 3 * target;
    for (int i = 0; i < 512; ++i) mesh.push_back(-kPi + kTwoPi * i / 512.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const double tk = state.angle(k).value(state.unit());
        const double bk = state.particle(k).beta;
        mesh.push_back(wrap_pi(tk));
        mesh.push_back(wrap_pi(tk - bk));
        mesh.push_back(wrap_pi(tk + bk));
    }
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());

    auto image = [&](double th) { return phi_apply(state, std::exp(cplx{kRadialLift, 0.0}) * unit_rot(th)); };

    struct Seg {
        double a, b;
        cplx fa, fb;
        double gap;
        bool operator<(const Seg& o) const { return gap < o.gap; }
    };
    std::vector<std::pair<double, cplx>> pts;
    pts.reserve(budget + mesh.size());
    for (double th : mesh) pts.emplace_back(th, image(th));

    std::priority_queue<Seg> queue;
    auto push_seg = [&](double a, const cplx& fa, double b, const cplx& fb) {
        if (b - a < 1e-13) return;
        queue.push({a, b, fa, fb, std::abs(fb - fa)});
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        push_seg(pts[i].first, pts[i].second, pts[i + 1].first, pts[i + 1].second);
    }
    push_seg(pts.back().first, pts.back().second, pts.front().first + kTwoPi, pts.front().second);

    const double tol = kTwoPi * std::exp(state.total_capacity) * 4.0 / static_cast<double>(target);
    while (pts.size() < budget && !queue.empty() && queue.top().gap > tol) {
        const Seg s = queue.top();
        queue.pop();
        const double mid = 0.5 * (s.a + s.b);
        const cplx fm = image(mid);
        pts.emplace_back(wrap_pi(mid), fm);
        push_seg(s.a, s.fa, mid, fm);
        push_seg(mid, fm, s.b, s.fb);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<cplx> trace;
    trace.reserve(pts.size() + 1);
    for (const auto& [th, f] : pts) trace.push_back(f);
    trace.push_back(pts.front().second);
    return trace;
}

std::vector<cplx> harmonic_sample(const ClusterState& state, Rng& rng, std::size_t k) {
    std::vector<cplx> out;
    out.reserve(k);
    const cplx lift = std::exp(cplx{kRadialLift, 0.0});
    for (std::size_t i = 0; i < k; ++i) {
        const double u = rng.uniform(0.0, kTwoPi);
        out.push_back(phi_apply(state, lift * unit_rot(u)));
    }
    return out;
}

} // namespace ale
