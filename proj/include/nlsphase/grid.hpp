#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nlsphase {

using cplx = std::complex<double>;

struct GridSpec {
    double r_max = 200.0;
    std::size_t n = 4096;
    double dt = 0.005;

    void validate() const;
};

// Uniform radial grid r_j = j h, j = 1..n (stored 0-based), with the sine
// basis sin(k_m r), k_m = pi m / r_max, in which d^2/dr^2 is diagonal.
// The last node sits on the Dirichlet boundary.
class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return spec_.n; }
    double h() const { return h_; }
    double r_max() const { return spec_.r_max; }
    double r(std::size_t j) const { return static_cast<double>(j + 1) * h_; }
    std::span<const double> radii() const { return r_; }
    // k_m for m = 1..n-1 (index m-1): the active sine modes.
    std::span<const double> wavenumbers() const { return k_; }
    std::size_t modes() const { return k_.size(); }

    bool same_as(const Grid& other) const;

    // u_j = sum_m c_m sin(k_m r_j)
    std::vector<cplx> sine_coefficients(std::span<const cplx> u) const;
    std::vector<cplx> from_sine_coefficients(std::span<const cplx> c) const;

    // Multiply sine coefficient m by mult[m-1] (in place on u).
    void apply_multiplier(std::span<cplx> u, std::span<const cplx> mult) const;
    void apply_multiplier(std::span<cplx> u, const std::function<double(double)>& of_k) const;
    // Spectral d/dr of the odd extension, sampled at r_1..r_n.
    std::vector<cplx> derivative(std::span<const cplx> u) const;
    // Trigonometric interpolant sampled at r = i h / factor, i = 0..factor*n.
    std::vector<cplx> oversample(std::span<const cplx> u, std::size_t factor) const;

private:
    GridSpec spec_;
    double h_;
    std::vector<double> r_;
    std::vector<double> k_;

    std::vector<cplx> odd_spectrum(std::span<const cplx> u) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const GridSpec& spec);

// Radially symmetric state stored in reduced form u_j = r_j phi(r_j).
struct RadialField {
    GridPtr grid;
    std::vector<cplx> u;
    double time = 0.0;

    RadialField() = default;
    RadialField(GridPtr g, std::vector<cplx> samples, double t = 0.0);

    static RadialField zeros(GridPtr g, double t = 0.0);
    static RadialField from_phi(GridPtr g, const std::function<cplx(double)>& phi, double t = 0.0);

    std::size_t size() const { return u.size(); }
    double r(std::size_t j) const { return grid->r(j); }
    cplx phi(std::size_t j) const { return u[j] / grid->r(j); }
    void check() const;

    RadialField& operator+=(const RadialField& o);
    RadialField& operator-=(const RadialField& o);
    RadialField& operator*=(cplx s);
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(cplx s, RadialField a);

void require_same_grid(const RadialField& a, const RadialField& b);

struct NormKind {
    enum class Tag { L2, H1, Hdot1, WeightedX } tag = Tag::L2;
    double s = 0.0;  // exponent for WeightedX

    static NormKind l2() { return {Tag::L2, 0.0}; }
    static NormKind h1() { return {Tag::H1, 0.0}; }
    static NormKind hdot1() { return {Tag::Hdot1, 0.0}; }
    static NormKind weighted_x(double s);
};

double norm(const RadialField& f, NormKind kind = NormKind::l2());
// 4 pi h sum u_j conj(v_j): conjugate-linear in the second slot.
cplx inner(const RadialField& f, const RadialField& g);
// Mass of the field on r in [lo, hi].
double shell_mass(const RadialField& f, double lo, double hi);
// Fraction of the mass in the last `fraction` of the grid.
double edge_mass_fraction(const RadialField& f, double fraction = 0.05);

void write_field_csv(const std::string& path, const RadialField& f);
RadialField read_field_csv(const std::string& path);

}  // namespace nlsphase
