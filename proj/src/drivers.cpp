#include "roughns/drivers.hpp"

#include "roughns/fft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughns {

namespace {

SpectralField scalar_component(const SpectralField& f, int c) {
    SpectralField out = SpectralField::scalar(f.dim(), f.trunc());
    for (std::size_t m = 0; m < f.mode_count(); ++m) out.coef(0, m) = f.coef(c, m);
    return out;
}

SpectralField cut(const SpectralField& f, int trunc_out) {
    if (trunc_out < 0 || trunc_out == f.trunc()) return f;
    return retruncate(f, trunc_out);
}

} // namespace

VectorFieldFamily::VectorFieldFamily(std::vector<SpectralField> sigmas)
    : sigma_(std::move(sigmas)) {
    if (sigma_.empty()) throw std::invalid_argument("VectorFieldFamily: empty family");
    const int d = sigma_.front().dim();
    for (const auto& s : sigma_) {
        if (s.dim() != d || !s.is_vector())
            throw std::invalid_argument("VectorFieldFamily: all fields must be d-vectors");
        if (!is_hermitian(s, 1e-11 * (1.0 + s.max_abs_coef())))
            throw std::invalid_argument("VectorFieldFamily: field is not real-valued");
        if (divergence_defect(s) > 1e-11)
            throw std::invalid_argument("VectorFieldFamily: field is not divergence-free");
    }
    int k[3];
    for (const auto& s : sigma_)
        for (int c = 0; c < s.comps(); ++c)
            for (std::size_t m = 0; m < s.mode_count(); ++m) {
                if (std::abs(s.coef(c, m)) == 0.0) continue;
                s.wavevector(m, k);
                for (int a = 0; a < d; ++a) max_freq_ = std::max(max_freq_, std::abs(k[a]));
            }
}

double VectorFieldFamily::seminorm_inf(int order) const {
    if (order < 0 || order > 3)
        throw std::invalid_argument("seminorm_inf: order must lie in [0,3]");
    const int d = dim();
    double worst = 0.0;
    // oversampled grid keeps the sup-norm estimate honest for band-limited
    // fields
    const int g = static_cast<int>(next_pow2(static_cast<std::size_t>(8 * (max_freq_ + 1))));
    for (const auto& s : sigma_) {
        if (order == 0) {
            const PhysicalGrid grid = transform(s, g);
            for (double v : grid.values) worst = std::max(worst, std::abs(v));
            continue;
        }
        // iterate all derivative multi-indices of the given order
        std::vector<int> counter(static_cast<std::size_t>(order), 0);
        while (true) {
            SpectralField f = s;
            for (int i = 0; i < order; ++i) f = derivative(f, counter[static_cast<std::size_t>(i)]);
            const PhysicalGrid grid = transform(f, g);
            for (double v : grid.values) worst = std::max(worst, std::abs(v));
            int pos = 0;
            for (; pos < order; ++pos) {
                if (++counter[static_cast<std::size_t>(pos)] < d) break;
                counter[static_cast<std::size_t>(pos)] = 0;
            }
            if (pos == order) break;
        }
    }
    return worst;
}

DriverIncrement DriverIncrement::from_lift(const RoughPathLift& lift, double s, double t) {
    DriverIncrement inc;
    inc.s = s;
    inc.t = t;
    inc.z = lift.increment(s, t);
    inc.zz = lift.level_two(s, t);
    return inc;
}

DriverIncrement DriverIncrement::zero(int k_dim) {
    DriverIncrement inc;
    inc.z.assign(static_cast<std::size_t>(k_dim), 0.0);
    inc.zz = LevelTwo(k_dim);
    return inc;
}

SpectralField lie_oneform(const SpectralField& sigma, const SpectralField& phi,
                          int trunc_out) {
    if (!sigma.is_vector() || !phi.is_vector() || sigma.dim() != phi.dim())
        throw std::invalid_argument("lie_oneform: vector fields of equal dimension required");
    const int d = phi.dim();
    SpectralField out = advect(sigma, phi);
    // (grad sigma) phi, component i: sum_j phi^j d_i sigma^j
    int k[3];
    for (int i = 0; i < d; ++i) {
        const SpectralField dsig = derivative(sigma, i);
        const SpectralField dot = dealiased_product(dsig, phi); // vector . vector
        for (std::size_t m = 0; m < out.mode_count(); ++m) {
            out.wavevector(m, k);
            out.coef(i, m) += dot.coef(0, dot.index(k));
        }
    }
    return cut(out, trunc_out);
}

SpectralField lie_vorticity(const SpectralField& sigma, const SpectralField& phi,
                            int trunc_out) {
    if (!sigma.is_vector() || sigma.dim() != phi.dim())
        throw std::invalid_argument("lie_vorticity: dimension mismatch");
    if (sigma.dim() == 2) {
        if (!phi.is_scalar())
            throw std::invalid_argument("lie_vorticity: scalar vorticity required in d=2");
        return cut(advect(sigma, phi), trunc_out);
    }
    if (!phi.is_vector())
        throw std::invalid_argument("lie_vorticity: vector vorticity required in d=3");
    SpectralField out = advect(sigma, phi);
    out -= advect(phi, sigma);
    return cut(out, trunc_out);
}

namespace {

// single driver letter: project(truncate(lie(sigma, phi))) in the requested
// realization. Projections are mode-diagonal, so truncation order is
// immaterial; truncating first matches the Galerkin operators.
SpectralField one_step(const VectorFieldFamily& fam, int k, const SpectralField& phi,
                       DriverForm form, int trunc_out) {
    switch (form) {
        case DriverForm::Vorticity: {
            SpectralField r = cut(lie_vorticity(fam.sigma(k), phi), trunc_out);
            r.remove_mean();
            if (r.dim() == 3) r = leray_project(r);
            return r;
        }
        case DriverForm::VelocityLeray: {
            SpectralField r = cut(lie_oneform(fam.sigma(k), phi), trunc_out);
            return leray_project(r);
        }
        case DriverForm::VelocityGradient: {
            SpectralField r = cut(lie_oneform(fam.sigma(k), phi), trunc_out);
            return q_project(r);
        }
    }
    throw std::logic_error("one_step: bad form");
}

DriverForm inner_form(DriverForm form) {
    // the gradient-sector driver composes through the Leray sector at level 2
    return form == DriverForm::VelocityGradient ? DriverForm::VelocityLeray : form;
}

SpectralField zero_like_output(const VectorFieldFamily& fam, const SpectralField& phi,
                               DriverForm form, int trunc_out) {
    const int n = trunc_out >= 0 ? trunc_out : std::max(fam.sigma(0).trunc(), phi.trunc());
    if (form == DriverForm::Vorticity && phi.dim() == 2) return SpectralField::scalar(2, n);
    return SpectralField::vector(phi.dim(), n);
}

} // namespace

SpectralField apply_first_level(const VectorFieldFamily& fam, const DriverIncrement& inc,
                                const SpectralField& phi, DriverForm form, int trunc_out) {
    if (static_cast<int>(inc.z.size()) != fam.size())
        throw std::invalid_argument("apply_first_level: increment/family size mismatch");
    SpectralField out = zero_like_output(fam, phi, form, trunc_out);
    for (int k = 0; k < fam.size(); ++k) {
        if (inc.z[static_cast<std::size_t>(k)] == 0.0) continue;
        SpectralField term = one_step(fam, k, phi, form, out.trunc());
        out.axpy(inc.z[static_cast<std::size_t>(k)], term);
    }
    return out;
}

SpectralField apply_second_level(const VectorFieldFamily& fam, const DriverIncrement& inc,
                                 const SpectralField& phi, DriverForm form, int trunc_out) {
    if (inc.zz.k_dim != fam.size())
        throw std::invalid_argument("apply_second_level: increment/family size mismatch");
    SpectralField out = zero_like_output(fam, phi, form, trunc_out);
    const DriverForm inner = inner_form(form);
    for (int l = 0; l < fam.size(); ++l) {
        bool needed = false;
        for (int k = 0; k < fam.size(); ++k) needed = needed || inc.zz(l, k) != 0.0;
        if (!needed) continue;
        const SpectralField mid = one_step(fam, l, phi, inner, out.trunc());
        for (int k = 0; k < fam.size(); ++k) {
            const double w = inc.zz(l, k);
            if (w == 0.0) continue;
            SpectralField term = one_step(fam, k, mid, form, out.trunc());
            out.axpy(w, term);
        }
    }
    return out;
}

SpectralField chen_defect_field(const VectorFieldFamily& fam, const RoughPathLift& lift,
                                double s, double mid, double t, const SpectralField& phi,
                                DriverForm form, int trunc_out) {
    const auto inc_st = DriverIncrement::from_lift(lift, s, t);
    const auto inc_sm = DriverIncrement::from_lift(lift, s, mid);
    const auto inc_mt = DriverIncrement::from_lift(lift, mid, t);
    SpectralField d = apply_second_level(fam, inc_st, phi, form, trunc_out);
    d -= apply_second_level(fam, inc_sm, phi, form, d.trunc());
    d -= apply_second_level(fam, inc_mt, phi, form, d.trunc());
    const SpectralField first =
        apply_first_level(fam, inc_sm, phi, inner_form(form), d.trunc());
    d -= apply_first_level(fam, inc_mt, first, form, d.trunc());
    return d;
}

SpectralField quasi_chen_defect(const VectorFieldFamily& fam, const RoughPathLift& lift,
                                double s, double mid, double t, const SpectralField& phi,
                                int trunc_out) {
    return chen_defect_field(fam, lift, s, mid, t, phi, DriverForm::VelocityGradient,
                             trunc_out);
}

MeanIncrements mean_increments(const VectorFieldFamily& fam, const DriverIncrement& inc,
                               const SpectralField& v) {
    if (!v.is_vector()) throw std::invalid_argument("mean_increments: vector field required");
    if (!is_mean_free(v, 1e-10 * (1.0 + v.max_abs_coef())))
        throw std::invalid_argument("mean_increments: velocity must be mean-free");
    const int d = v.dim();
    MeanIncrements out;

    const auto density = mean_density(fam, v);
    for (int k = 0; k < fam.size(); ++k)
        for (int m = 0; m < d; ++m)
            out.first[static_cast<std::size_t>(m)] +=
                density[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] *
                inc.z[static_cast<std::size_t>(k)];

    // second level: (v^l, d_n sigma_j^l d_m sigma_k^n - sigma_j^n d_n d_m sigma_k^l)
    for (int j = 0; j < fam.size(); ++j)
        for (int k = 0; k < fam.size(); ++k) {
            const double w = inc.zz(j, k);
            if (w == 0.0) continue;
            const SpectralField& sj = fam.sigma(j);
            const SpectralField& sk = fam.sigma(k);
            for (int m = 0; m < d; ++m) {
                const SpectralField dmsk = derivative(sk, m); // components d_m sigma_k^n
                // the product of two band-F fields lives in band 2F; embed
                // one factor so nothing is cut
                const int band2 = 2 * std::max(1, fam.max_frequency());
                double val = 0.0;
                for (int l = 0; l < d; ++l) {
                    SpectralField h = SpectralField::scalar(d, band2);
                    for (int n = 0; n < d; ++n) {
                        const SpectralField t1 = dealiased_product(
                            retruncate(scalar_component(derivative(sj, n), l), band2),
                            scalar_component(dmsk, n));
                        const SpectralField t2 = dealiased_product(
                            retruncate(scalar_component(sj, n), band2),
                            scalar_component(derivative(derivative(sk, n), m), l));
                        h += t1;
                        h -= t2;
                    }
                    val += l2_inner(scalar_component(v, l), h);
                }
                out.second[static_cast<std::size_t>(m)] += val * w;
            }
        }
    return out;
}

std::vector<std::array<double, 3>> mean_density(const VectorFieldFamily& fam,
                                                const SpectralField& v) {
    const int d = v.dim();
    std::vector<std::array<double, 3>> out(static_cast<std::size_t>(fam.size()),
                                           {0.0, 0.0, 0.0});
    for (int k = 0; k < fam.size(); ++k)
        for (int m = 0; m < d; ++m) {
            double acc = 0.0;
            const SpectralField dms = derivative(fam.sigma(k), m);
            for (int l = 0; l < d; ++l)
                acc += l2_inner(scalar_component(v, l), scalar_component(dms, l));
            out[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = acc;
        }
    return out;
}

// ---- family file format -----------------------------------------------------

VectorFieldFamily read_family(std::istream& is) {
    int d = 0, kcount = 0;
    int current = -1;
    std::string line;
    int lineno = 0;
    struct ModeEntry {
        int k[3];
        int comp;
        std::complex<double> amp;
    };
    std::vector<std::vector<ModeEntry>> entries;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("family file line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "d") {
            if (!(ls >> d) || (d != 2 && d != 3)) fail("d must be 2 or 3");
        } else if (tok == "K") {
            if (!(ls >> kcount) || kcount <= 0) fail("K must be positive");
            entries.resize(static_cast<std::size_t>(kcount));
        } else if (tok == "sigma") {
            int idx = 0;
            if (!(ls >> idx) || idx < 1 || idx > kcount) fail("sigma index out of range");
            current = idx - 1;
        } else if (tok == "mode") {
            if (d == 0) fail("mode before d");
            if (current < 0) fail("mode before sigma");
            ModeEntry e{};
            for (int a = 0; a < d; ++a)
                if (!(ls >> e.k[a])) fail("mode: missing wavevector entry");
            double re = 0.0, im = 0.0;
            int comp = 0;
            if (!(ls >> re >> im >> comp)) fail("mode: expected re im component");
            if (comp < 1 || comp > d) fail("mode: component out of range");
            e.comp = comp - 1;
            e.amp = {re, im};
            entries[static_cast<std::size_t>(current)].push_back(e);
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    if (d == 0 || kcount == 0) throw std::runtime_error("family file: missing d or K");

    int max_freq = 1;
    for (const auto& list : entries)
        for (const auto& e : list)
            for (int a = 0; a < d; ++a) max_freq = std::max(max_freq, std::abs(e.k[a]));

    std::vector<SpectralField> sigmas;
    for (int s = 0; s < kcount; ++s) {
        SpectralField f = SpectralField::vector(d, max_freq);
        for (const auto& e : entries[static_cast<std::size_t>(s)]) {
            const std::size_t m = f.index(e.k);
            if (std::abs(f.coef(e.comp, m)) != 0.0 &&
                std::abs(f.coef(e.comp, m) - e.amp) > 1e-14)
                throw std::runtime_error("family file: conflicting duplicate mode");
            f.coef(e.comp, m) = e.amp;
        }
        // fill missing conjugates; reject inconsistent pairs
        SpectralField g = f;
        int k[3], nk[3];
        for (int c = 0; c < d; ++c)
            for (std::size_t m = 0; m < f.mode_count(); ++m) {
                f.wavevector(m, k);
                nk[0] = -k[0];
                nk[1] = -k[1];
                nk[2] = -k[2];
                const auto a = f.coef(c, m);
                const auto b = f.coef(c, f.index(nk));
                if (std::abs(a) == 0.0 && std::abs(b) == 0.0) continue;
                if (std::abs(a) != 0.0 && std::abs(b) != 0.0) {
                    if (std::abs(a - std::conj(b)) > 1e-12 * (std::abs(a) + std::abs(b)))
                        throw std::runtime_error(
                            "family file: modes violate the Hermitian constraint");
                } else if (std::abs(a) != 0.0) {
                    g.coef(c, g.index(nk)) = std::conj(a);
                }
            }
        if (divergence_defect(g) > 1e-11)
            throw std::runtime_error("family file: field is not divergence-free");
        sigmas.push_back(std::move(g));
    }
    return VectorFieldFamily(std::move(sigmas));
}

VectorFieldFamily read_family_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_family_file: cannot open " + path);
    return read_family(is);
}

VectorFieldFamily parse_family(const std::string& text) {
    std::istringstream is(text);
    return read_family(is);
}

void write_family(const VectorFieldFamily& fam, std::ostream& os) {
    os << "d " << fam.dim() << "\n";
    os << "K " << fam.size() << "\n";
    os.precision(17);
    int k[3];
    for (int s = 0; s < fam.size(); ++s) {
        os << "sigma " << (s + 1) << "\n";
        const auto& f = fam.sigma(s);
        for (int c = 0; c < f.comps(); ++c)
            for (std::size_t m = 0; m < f.mode_count(); ++m) {
                if (std::abs(f.coef(c, m)) == 0.0) continue;
                f.wavevector(m, k);
                os << "mode";
                for (int a = 0; a < f.dim(); ++a) os << " " << k[a];
                os << " " << f.coef(c, m).real() << " " << f.coef(c, m).imag() << " "
                   << (c + 1) << "\n";
            }
    }
}

void write_family_file(const VectorFieldFamily& fam, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_family_file: cannot open " + path);
    write_family(fam, os);
}

} // namespace roughns
