#include "nlsphase/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlsphase/error.hpp"
#include "nlsphase/fft.hpp"
#include "nlsphase/io.hpp"
#include "nlsphase/simd/kernels.hpp"
#include "nlsphase/weights.hpp"

namespace nlsphase {

namespace {
constexpr double four_pi = 4.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

void GridSpec::validate() const {
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw ValidationError("grid: r_max must be positive");
    if (n < 16) throw ValidationError("grid: n must be at least 16");
    if (!is_power_of_two(n)) throw ValidationError("grid: n must be a power of two");
    if (!(dt > 0.0)) throw ValidationError("grid: dt must be positive");
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    h_ = spec_.r_max / static_cast<double>(spec_.n);
    r_.resize(spec_.n);
    for (std::size_t j = 0; j < spec_.n; ++j) r_[j] = r(j);
    k_.resize(spec_.n - 1);
    for (std::size_t m = 1; m < spec_.n; ++m)
        k_[m - 1] = std::numbers::pi * static_cast<double>(m) / spec_.r_max;
}

bool Grid::same_as(const Grid& other) const {
    return this == &other || (spec_.n == other.spec_.n && spec_.r_max == other.spec_.r_max);
}

// Spectrum of the odd extension v (length 2n): v_0 = v_n = 0, v_j = u_j,
// v_{2n-j} = -u_j.
std::vector<cplx> Grid::odd_spectrum(std::span<const cplx> u) const {
    const std::size_t n = spec_.n;
    if (u.size() != n) throw ValidationError("grid: sample count mismatch");
    std::vector<cplx> v(2 * n, cplx{});
    for (std::size_t j = 1; j < n; ++j) {
        v[j] = u[j - 1];
        v[2 * n - j] = -u[j - 1];
    }
    std::vector<cplx> spec(2 * n);
    fft_forward(v, spec);
    return spec;
}

std::vector<cplx> Grid::sine_coefficients(std::span<const cplx> u) const {
    const std::size_t n = spec_.n;
    auto V = odd_spectrum(u);
    std::vector<cplx> c(n - 1);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t m = 1; m < n; ++m) c[m - 1] = cplx{0.0, 1.0} * V[m] * scale;
    return c;
}

std::vector<cplx> Grid::from_sine_coefficients(std::span<const cplx> c) const {
    const std::size_t n = spec_.n;
    if (c.size() != n - 1) throw ValidationError("grid: coefficient count mismatch");
    std::vector<cplx> V(2 * n, cplx{});
    for (std::size_t m = 1; m < n; ++m) {
        V[m] = cplx{0.0, -1.0} * c[m - 1] * static_cast<double>(n);
        V[2 * n - m] = -V[m];
    }
    std::vector<cplx> v(2 * n);
    fft_backward(V, v);
    std::vector<cplx> u(n, cplx{});
    const double inv = 1.0 / static_cast<double>(2 * n);
    for (std::size_t j = 1; j < n; ++j) u[j - 1] = v[j] * inv;
    return u;
}

void Grid::apply_multiplier(std::span<cplx> u, std::span<const cplx> mult) const {
    const std::size_t n = spec_.n;
    if (mult.size() != n - 1) throw ValidationError("grid: multiplier length mismatch");
    auto V = odd_spectrum(u);
    V[0] = 0.0;
    V[n] = 0.0;
    const auto& k = simd::kernels();
    k.cmul(V.data() + 1, mult.data(), n - 1);
    for (std::size_t m = 1; m < n; ++m) V[2 * n - m] *= mult[m - 1];
    std::vector<cplx> v(2 * n);
    fft_backward(V, v);
    const double inv = 1.0 / static_cast<double>(2 * n);
    for (std::size_t j = 1; j < n; ++j) u[j - 1] = v[j] * inv;
    u[n - 1] = 0.0;
}

void Grid::apply_multiplier(std::span<cplx> u, const std::function<double(double)>& of_k) const {
    std::vector<cplx> mult(k_.size());
    for (std::size_t m = 0; m < k_.size(); ++m) mult[m] = of_k(k_[m]);
    apply_multiplier(u, mult);
}

std::vector<cplx> Grid::derivative(std::span<const cplx> u) const {
    const std::size_t n = spec_.n;
    auto V = odd_spectrum(u);
    const double dk = std::numbers::pi / spec_.r_max;
    V[0] = 0.0;
    V[n] = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
        const double km = dk * static_cast<double>(m);
        V[m] *= cplx{0.0, km};
        V[2 * n - m] *= cplx{0.0, -km};
    }
    std::vector<cplx> v(2 * n);
    fft_backward(V, v);
    std::vector<cplx> du(n);
    const double inv = 1.0 / static_cast<double>(2 * n);
    for (std::size_t j = 1; j <= n; ++j) du[j - 1] = v[j] * inv;
    return du;
}

std::vector<cplx> Grid::oversample(std::span<const cplx> u, std::size_t factor) const {
    const std::size_t n = spec_.n;
    if (factor == 0) throw ValidationError("grid: oversampling factor must be positive");
    auto V = odd_spectrum(u);
    const std::size_t L = 2 * n * factor;
    std::vector<cplx> W(L, cplx{});
    const double P = static_cast<double>(factor);
    for (std::size_t m = 1; m < n; ++m) {
        W[m] = P * V[m];
        W[L - m] = P * V[2 * n - m];
    }
    std::vector<cplx> w(L);
    fft_backward(W, w);
    std::vector<cplx> fine(n * factor + 1);
    const double inv = 1.0 / static_cast<double>(L);
    for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = w[i] * inv;
    fine.front() = 0.0;
    fine.back() = 0.0;
    return fine;
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

RadialField::RadialField(GridPtr g, std::vector<cplx> samples, double t)
    : grid(std::move(g)), u(std::move(samples)), time(t) {
    if (!grid) throw ValidationError("field: missing grid");
    if (u.size() != grid->size()) throw ValidationError("field: sample count must equal n");
}

RadialField RadialField::zeros(GridPtr g, double t) {
    const std::size_t n = g->size();
    return RadialField(std::move(g), std::vector<cplx>(n, cplx{}), t);
}

RadialField RadialField::from_phi(GridPtr g, const std::function<cplx(double)>& phi, double t) {
    std::vector<cplx> u(g->size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = g->r(j) * phi(g->r(j));
    u.back() = 0.0;
    return RadialField(std::move(g), std::move(u), t);
}

void RadialField::check() const {
    if (!grid) throw ValidationError("field: missing grid");
    if (u.size() != grid->size()) throw ValidationError("field: sample count must equal n");
    for (const auto& z : u)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericalError("field: non-finite sample");
}

void require_same_grid(const RadialField& a, const RadialField& b) {
    if (!a.grid || !b.grid || !a.grid->same_as(*b.grid))
        throw ValidationError("fields live on different grids");
}

RadialField& RadialField::operator+=(const RadialField& o) {
    require_same_grid(*this, o);
    simd::kernels().axpy(u.data(), 1.0, o.u.data(), u.size());
    return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
    require_same_grid(*this, o);
    simd::kernels().axpy(u.data(), -1.0, o.u.data(), u.size());
    return *this;
}

RadialField& RadialField::operator*=(cplx s) {
    for (auto& z : u) z *= s;
    return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(cplx s, RadialField a) { return a *= s; }

NormKind NormKind::weighted_x(double s) {
    if (!(s >= 0.0 && s <= 2.0)) throw ValidationError("WeightedX exponent must lie in [0,2]");
    return {Tag::WeightedX, s};
}

double norm(const RadialField& f, NormKind kind) {
    const Grid& g = *f.grid;
    const auto& k = simd::kernels();
    switch (kind.tag) {
        case NormKind::Tag::L2:
            return std::sqrt(four_pi * g.h() * k.weighted_norm2(f.u.data(), nullptr, f.size()));
        case NormKind::Tag::Hdot1:
        case NormKind::Tag::H1: {
            const auto c = g.sine_coefficients(f.u);
            double s1 = 0.0;
            for (std::size_t m = 0; m < c.size(); ++m)
                s1 += g.wavenumbers()[m] * g.wavenumbers()[m] * std::norm(c[m]);
            const double hdot2 = four_pi * 0.5 * g.r_max() * s1;
            if (kind.tag == NormKind::Tag::Hdot1) return std::sqrt(hdot2);
            const double l2 = norm(f, NormKind::l2());
            return std::sqrt(l2 * l2 + hdot2);
        }
        case NormKind::Tag::WeightedX: {
            const SmoothWeight& w = default_weight();
            std::vector<double> wt(f.size());
            for (std::size_t j = 0; j < wt.size(); ++j) wt[j] = std::pow(w.beta(g.r(j)), kind.s);
            return std::sqrt(four_pi * g.h() * k.weighted_norm2(f.u.data(), wt.data(), f.size()));
        }
    }
    return 0.0;
}

cplx inner(const RadialField& f, const RadialField& g) {
    require_same_grid(f, g);
    return four_pi * f.grid->h() * simd::kernels().dot_conj(f.u.data(), g.u.data(), f.size());
}

double shell_mass(const RadialField& f, double lo, double hi) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = f.r(j);
        if (r >= lo && r <= hi) s += std::norm(f.u[j]);
    }
    return four_pi * f.grid->h() * s;
}

double edge_mass_fraction(const RadialField& f, double fraction) {
    const double total = norm(f);
    if (total == 0.0) return 0.0;
    const double lo = f.grid->r_max() * (1.0 - fraction);
    return shell_mass(f, lo, f.grid->r_max()) / (total * total);
}

void write_field_csv(const std::string& path, const RadialField& f) {
    CsvWriter w(path);
    w.comment("r_max=" + fmt_num(f.grid->r_max()) + " n=" + std::to_string(f.size()) +
              " time_tag=" + fmt_num(f.time));
    w.header({"r", "re_phi", "im_phi"});
    for (std::size_t j = 0; j < f.size(); ++j) {
        const cplx p = f.phi(j);
        w.row({f.r(j), p.real(), p.imag()});
    }
}

RadialField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file " + path);
    std::string line;
    double r_max = 0.0, time = 0.0;
    std::size_t n = 0;
    std::vector<cplx> u;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                try {
                    if (key == "r_max") r_max = std::stod(val);
                    if (key == "n") n = std::stoul(val);
                    if (key == "time_tag") time = std::stod(val);
                } catch (const std::exception&) {
                    throw IoError("malformed header in " + path);
                }
            }
            continue;
        }
        if (line.rfind("r,", 0) == 0) continue;
        double r = 0, re = 0, im = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &re, &im) != 3)
            throw IoError("malformed row in " + path);
        u.emplace_back(r * re, r * im);
    }
    if (n == 0 || r_max <= 0.0 || u.size() != n) throw IoError("incomplete field file " + path);
    GridSpec spec;
    spec.r_max = r_max;
    spec.n = n;
    return RadialField(make_grid(spec), std::move(u), time);
}

}  // namespace nlsphase
