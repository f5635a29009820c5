#include "qs4/functional.hpp"

#include "qs4/error.hpp"
#include "qs4/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qs4 {

TimeWindow::TimeWindow(double t_max, int n_t) : t_max_(t_max), n_t_(n_t)
{
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("time window t_max must be positive");
    if (n_t < 3 || n_t % 2 == 0) throw ValidationError("time window n_t must be odd and >= 3");
}

bool is_real_field(const Field& f)
{
    for (const cplx& z : f.values())
        if (z.imag() != 0.0) return false;
    return true;
}

int node_chunks(int count) { return (count + kNodeChunk - 1) / kNodeChunk; }

void visit_nodes(const TimeWindow& w, int first, int count, int chunk_lo, int chunk_hi,
                 const std::vector<double>& sym,
                 const std::function<void(int chunk, int j, const std::vector<cplx>& phase)>& body)
{
    std::vector<cplx> step(sym.size());
    for (std::size_t p = 0; p < sym.size(); ++p) step[p] = std::polar(1.0, w.step() * sym[p]);
    parallel_for(chunk_hi - chunk_lo, [&](int c) {
        const int chunk = chunk_lo + c;
        const int k_lo = chunk * kNodeChunk;
        const int k_hi = std::min(count, k_lo + kNodeChunk);
        std::vector<cplx> phase(sym.size());
        for (int k = k_lo; k < k_hi; ++k) {
            const int j = first + k;
            if (k == k_lo) {
                const double t = w.node(j);
                for (std::size_t p = 0; p < sym.size(); ++p) phase[p] = std::polar(1.0, t * sym[p]);
            } else {
                for (std::size_t p = 0; p < sym.size(); ++p) phase[p] *= step[p];
            }
            body(chunk, j, phase);
        }
    });
}

namespace {

void check_p(double p)
{
    if (p != 3.0 && p != 4.0 && p != 6.0) throw ValidationError("space-time exponent must be 3, 4 or 6");
}

double pow_abs(double mod2, double p)
{
    if (p == 6.0) return mod2 * mod2 * mod2;
    if (p == 4.0) return mod2 * mod2;
    return mod2 * std::sqrt(mod2);
}

std::vector<double> radial_power(const Grid2D& g, double s)
{
    const int n = g.n();
    std::vector<double> w(g.size());
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2)
            w[static_cast<std::size_t>(p1) * n + p2] = std::pow(std::hypot(g.xi(p1), g.xi(p2)), s);
    return w;
}

} // namespace

std::vector<double> slice_integrals(const Field& f, double p, double frac_order, const TimeWindow& w,
                                    Dispersion d)
{
    check_p(p);
    if (!(frac_order >= 0.0) || !std::isfinite(frac_order)) throw ValidationError("fractional order must be >= 0");
    const Grid2D& g = f.grid();
    SpectralField F = dft_forward(f);
    nyquist_guard(F, "spacetime_norm");
    if (frac_order != 0.0) {
        const std::vector<double> rw = radial_power(g, frac_order);
        for (std::size_t q = 0; q < rw.size(); ++q) F.coeffs()[q] *= rw[q];
    }
    const PaddedBasis basis(g, kPadFactor);
    const std::vector<double> sym = dispersion_symbol(g, d);

    const bool half = is_real_field(f);
    const int first = half ? w.center() : 0;
    const int count = w.n_t() - first;
    std::vector<double> out(w.n_t(), 0.0);
    visit_nodes(w, first, count, 0, node_chunks(count), sym,
                [&](int, int j, const std::vector<cplx>& phase) {
                    thread_local std::vector<cplx> coeffs, phys;
                    coeffs.resize(phase.size());
                    for (std::size_t q = 0; q < phase.size(); ++q) coeffs[q] = F.coeffs()[q] * phase[q];
                    basis.to_physical(coeffs.data(), phys);
                    double s = 0.0;
                    for (const cplx& z : phys) s += pow_abs(std::norm(z), p);
                    out[j] = s * basis.cell();
                });
    if (half)
        for (int j = 0; j < w.center(); ++j) out[j] = out[w.n_t() - 1 - j];
    return out;
}

double tail_fraction(const std::vector<double>& slices, const TimeWindow& w)
{
    double total = 0.0;
    for (int j = 0; j < w.n_t(); ++j) total += w.weight(j) * slices[j];
    if (!(total > 0.0)) return 0.0;
    const int last = w.n_t() - 1;
    return (w.weight(0) * slices[0] + w.weight(last) * slices[last]) / total;
}

double spacetime_norm(const Field& f, double p, double frac_order, const TimeWindow& w, const NormOptions& opt)
{
    const std::vector<double> s = slice_integrals(f, p, frac_order, w, opt.dispersion);
    double total = 0.0;
    for (int j = 0; j < w.n_t(); ++j) total += w.weight(j) * s[j];
    if (total == 0.0) return 0.0;
    const double tail = tail_fraction(s, w);
    if (tail >= opt.tail_tolerance) {
        std::ostringstream os;
        os << "tail test failed: endpoint slices carry " << tail << " of the space-time integral (limit "
           << opt.tail_tolerance << "); enlarge t_max";
        throw NumericalGuardError(os.str());
    }
    return std::pow(total, 1.0 / p);
}

QuotientValue strichartz_quotient(const Field& f, const TimeWindow& w, const NormOptions& opt)
{
    QuotientValue q;
    q.denominator = f.norm();
    if (!(q.denominator > 0.0)) throw ValidationError("strichartz_quotient: zero field");
    q.numerator = spacetime_norm(f, 6.0, 0.0, w, opt);
    q.quotient = q.numerator / q.denominator;
    return q;
}

cplx q_form(const std::array<const Field*, 6>& f, const TimeWindow& w)
{
    const Grid2D& g = f[0]->grid();
    for (const Field* x : f)
        if (x->grid() != g) throw ValidationError("q_form: grid mismatch");
    std::vector<SpectralField> F;
    for (const Field* x : f) {
        F.push_back(dft_forward(*x));
        nyquist_guard(F.back(), "q_form");
    }
    const PaddedBasis basis(g, kPadFactor);
    const std::vector<double> sym = dispersion_symbol(g, Dispersion::quartic);
    std::vector<cplx> slice(w.n_t());
    visit_nodes(w, 0, w.n_t(), 0, node_chunks(w.n_t()), sym,
                [&](int, int j, const std::vector<cplx>& phase) {
                    thread_local std::vector<cplx> coeffs, phys, prod;
                    const std::size_t mm = static_cast<std::size_t>(basis.m()) * basis.m();
                    prod.assign(mm, cplx(1.0, 0.0));
                    coeffs.resize(phase.size());
                    for (int k = 0; k < 6; ++k) {
                        for (std::size_t q = 0; q < phase.size(); ++q) coeffs[q] = F[k].coeffs()[q] * phase[q];
                        basis.to_physical(coeffs.data(), phys);
                        if (k < 3)
                            for (std::size_t i = 0; i < mm; ++i) prod[i] *= std::conj(phys[i]);
                        else
                            for (std::size_t i = 0; i < mm; ++i) prod[i] *= phys[i];
                    }
                    cplx s = 0.0;
                    for (const cplx& z : prod) s += z;
                    slice[j] = s * basis.cell();
                });
    cplx total = 0.0;
    for (int j = 0; j < w.n_t(); ++j) total += w.weight(j) * slice[j];
    return total;
}

cplx q_form(const Field& f1, const Field& f2, const Field& f3, const Field& f4, const Field& f5,
            const Field& f6, const TimeWindow& w)
{
    return q_form(std::array<const Field*, 6>{&f1, &f2, &f3, &f4, &f5, &f6}, w);
}

Field el_map(const Field& f, const TimeWindow& w)
{
    const Grid2D& g = f.grid();
    if (!(f.norm() > 0.0)) throw ValidationError("el_map: zero field");
    const SpectralField F = dft_forward(f);
    nyquist_guard(F, "el_map");
    const PaddedBasis basis(g, kPadFactor);
    const std::vector<double> sym = dispersion_symbol(g, Dispersion::quartic);
    const std::size_t nn = g.size();

    // For real f the slices at -t are conjugates of those at +t, so
    // Lambda = 2 Re( w_0/2 q_0 + sum_{t>0} w_t e^{-it Delta^2} q_t ).
    const bool half = is_real_field(f);
    const int first = half ? w.center() : 0;
    const int count = w.n_t() - first;
    const int nchunks = node_chunks(count);

    // chunk partial sums are added in chunk order, whatever the thread count
    std::vector<cplx> total(nn, cplx(0.0, 0.0));
    const int batch = thread_count();
    std::vector<std::vector<cplx>> partial(batch, std::vector<cplx>(nn));
    for (int c0 = 0; c0 < nchunks; c0 += batch) {
        const int c1 = std::min(nchunks, c0 + batch);
        for (int b = 0; b < c1 - c0; ++b) std::fill(partial[b].begin(), partial[b].end(), cplx(0.0, 0.0));
        visit_nodes(w, first, count, c0, c1, sym, [&](int chunk, int j, const std::vector<cplx>& phase) {
            thread_local std::vector<cplx> coeffs, phys, q;
            std::vector<cplx>& acc = partial[chunk - c0];
            double wt = w.weight(j);
            if (half && j == w.center()) wt *= 0.5;
            coeffs.resize(nn);
            q.resize(nn);
            for (std::size_t p = 0; p < nn; ++p) coeffs[p] = F.coeffs()[p] * phase[p];
            basis.to_physical(coeffs.data(), phys);
            for (cplx& z : phys) {
                const double m2 = std::norm(z);
                z *= m2 * m2;
            }
            basis.to_spectral(phys, q.data());
            for (std::size_t p = 0; p < nn; ++p) acc[p] += q[p] * std::conj(phase[p]) * wt;
        });
        for (int b = 0; b < c1 - c0; ++b)
            for (std::size_t p = 0; p < nn; ++p) total[p] += partial[b][p];
    }

    SpectralField L(g, std::move(total));
    Field lam = dft_inverse(L);
    if (half)
        for (cplx& z : lam.values()) z = cplx(2.0 * z.real(), 0.0);
    nyquist_guard(half ? dft_forward(lam) : L, "el_map output");
    return lam;
}

} // namespace qs4
