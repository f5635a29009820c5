#ifndef QS4_FUNCTIONAL_HPP
#define QS4_FUNCTIONAL_HPP

#include "qs4/grid.hpp"
#include "qs4/propagator.hpp"

#include <array>
#include <functional>
#include <vector>

namespace qs4 {

// Composite trapezoid on [-t_max, t_max] with n_t (odd) nodes; t = 0 is the
// middle node.
class TimeWindow {
public:
    TimeWindow(double t_max, int n_t);

    double t_max() const { return t_max_; }
    int n_t() const { return n_t_; }
    int center() const { return (n_t_ - 1) / 2; }
    double step() const { return t_max_ / center(); }
    double node(int j) const { return (j - center()) * step(); }
    double weight(int j) const { return (j == 0 || j == n_t_ - 1) ? 0.5 * step() : step(); }

private:
    double t_max_;
    int n_t_;
};

// Quintic and sextic products are formed on a 3x zero-padded grid.
inline constexpr int kPadFactor = 3;

// A window is accepted when the two endpoint slices carry less than this
// fraction of the accumulated p-th power.
inline constexpr double kTailTolerance = 1e-3;

struct NormOptions {
    double tail_tolerance = kTailTolerance;
    Dispersion dispersion = Dispersion::quartic;
};

// Per-node spatial integrals int |D^s u(t)|^p dx, in window order.
std::vector<double> slice_integrals(const Field& f, double p, double frac_order, const TimeWindow& w,
                                    Dispersion d = Dispersion::quartic);

// Weighted endpoint contribution relative to the full trapezoid sum.
double tail_fraction(const std::vector<double>& slices, const TimeWindow& w);

double spacetime_norm(const Field& f, double p, double frac_order, const TimeWindow& w,
                      const NormOptions& opt = {});

struct QuotientValue {
    double numerator = 0.0;
    double denominator = 0.0;
    double quotient = 0.0;
};

QuotientValue strichartz_quotient(const Field& f, const TimeWindow& w, const NormOptions& opt = {});

// Q(f1..f6) = int int conj(u1 u2 u3) u4 u5 u6 dx dt with u_k = e^{it Delta^2} f_k
cplx q_form(const std::array<const Field*, 6>& f, const TimeWindow& w);
cplx q_form(const Field& f1, const Field& f2, const Field& f3, const Field& f4, const Field& f5,
            const Field& f6, const TimeWindow& w);

// Lambda(f) = sum_t w_t e^{-it Delta^2}[|u|^4 u], the field representing
// g -> Q(g, f, f, f, f, f).
Field el_map(const Field& f, const TimeWindow& w);

// Window nodes first .. first+count-1 are visited in fixed chunks of
// kNodeChunk (chunks in [chunk_lo, chunk_hi) only), chunks possibly in
// parallel. The callback gets the chunk index, the node index and
// e^{i t_j sym} for every lattice frequency; the phase is advanced by
// recurrence inside a chunk and recomputed exactly at each chunk start.
inline constexpr int kNodeChunk = 16;
int node_chunks(int count);
void visit_nodes(const TimeWindow& w, int first, int count, int chunk_lo, int chunk_hi,
                 const std::vector<double>& sym,
                 const std::function<void(int chunk, int j, const std::vector<cplx>& phase)>& body);

// True when every sample has zero imaginary part; such fields have
// u(-t) = conj(u(t)) and only half of the window is evaluated.
bool is_real_field(const Field& f);

} // namespace qs4

#endif
