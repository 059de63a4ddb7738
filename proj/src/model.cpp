#include "model.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace sqd {

namespace {

void add(ValidationReport& r, std::string field, int row, int col, std::string msg) {
    r.violations.push_back({std::move(field), row, col, std::move(msg)});
}

bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_shape(const Matrix& M, std::size_t rows, std::size_t cols, const std::string& name,
                 ValidationReport& r) {
    if (M.rows() != rows || M.cols() != cols) {
        std::ostringstream os;
        os << "expected " << rows << "x" << cols << ", got " << M.rows() << "x" << M.cols();
        add(r, name, -1, -1, os.str());
    }
}

void check_rows_identical(const Matrix& M, const std::string& name, ValidationReport& r) {
    for (std::size_t i = 2; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            if (std::abs(M(i, j) - M(1, j)) > kBeliefTol) {
                add(r, name, static_cast<int>(i + 1), static_cast<int>(j + 1),
                    "rows 2..X must be identical");
                break;
            }
}

}  // namespace

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        os << v.field;
        if (v.row >= 0) os << " row " << v.row;
        if (v.col >= 0) os << " col " << v.col;
        os << ": " << v.message << "\n";
    }
    return os.str();
}

void check_stochastic(const Matrix& M, const std::string& name, ValidationReport& r) {
    if (!finite(M.data())) {
        add(r, name, -1, -1, "non-finite entry");
        return;
    }
    for (std::size_t i = 0; i < M.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < M.cols(); ++j) {
            if (M(i, j) < -kNegClamp)
                add(r, name, static_cast<int>(i + 1), static_cast<int>(j + 1), "negative entry");
            s += M(i, j);
        }
        if (std::abs(s - 1.0) > kRowSumTol) {
            std::ostringstream os;
            os.precision(12);
            os << "row sum " << s << " differs from 1";
            add(r, name, static_cast<int>(i + 1), -1, os.str());
        }
    }
}

void check_belief(const Vec& v, const std::string& name, ValidationReport& r) {
    if (!finite(v)) {
        add(r, name, -1, -1, "non-finite entry");
        return;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < -kNegClamp || v[i] > 1.0 + kBeliefTol)
            add(r, name, -1, static_cast<int>(i + 1), "entry outside [0,1]");
        s += v[i];
    }
    if (std::abs(s - 1.0) > kBeliefTol) add(r, name, -1, -1, "entries must sum to 1");
}

bool is_belief(const Vec& v, double tol) {
    double s = 0.0;
    for (double x : v) {
        if (!(x >= -tol && x <= 1.0 + tol)) return false;
        s += x;
    }
    return std::abs(s - 1.0) <= tol;
}

ValidationReport validate_model(const DetectionModel& m) {
    ValidationReport r;
    if (m.X < 2) add(r, "X", -1, -1, "need at least 2 states");
    if (m.Y < 1) add(r, "Y", -1, -1, "need at least 1 observation");
    if (m.A < 1) add(r, "A", -1, -1, "need at least 1 local decision");
    if (!r.ok()) return r;
    const auto X = static_cast<std::size_t>(m.X);
    const auto Y = static_cast<std::size_t>(m.Y);
    const auto A = static_cast<std::size_t>(m.A);
    std::size_t before = r.violations.size();
    check_shape(m.P, X, X, "P", r);
    check_shape(m.B, X, Y, "B", r);
    check_shape(m.c, X, A, "c", r);
    if (m.f.size() != X) add(r, "f", -1, -1, "length must equal X");
    if (m.pi0.size() != X) add(r, "pi0", -1, -1, "length must equal X");
    if (r.violations.size() != before) return r;

    check_stochastic(m.P, "P", r);
    check_stochastic(m.B, "B", r);
    for (std::size_t j = 0; j < X; ++j) {
        double want = j == 0 ? 1.0 : 0.0;
        if (std::abs(m.P(0, j) - want) > kRowSumTol) {
            add(r, "P", 1, static_cast<int>(j + 1), "row 1 must equal e1 (state 1 absorbing)");
            break;
        }
    }
    check_rows_identical(m.B, "B", r);
    check_rows_identical(m.c, "c", r);
    if (!finite(m.c.data())) add(r, "c", -1, -1, "non-finite entry");

    check_belief(m.pi0, "pi0", r);
    if (std::abs(m.pi0[0]) > kNegClamp) add(r, "pi0", -1, 1, "pi0(1) must be 0");

    if (!finite(m.f)) add(r, "f", -1, -1, "non-finite entry");
    if (std::abs(m.f[0]) > 0.0) add(r, "f", -1, 1, "f(1) must be 0");
    for (std::size_t i = 1; i < X; ++i)
        if (m.f[i] < 0.0) add(r, "f", -1, static_cast<int>(i + 1), "false-alarm cost must be >= 0");

    if (!std::isfinite(m.d) || m.d < 0.0) add(r, "d", -1, -1, "delay cost must be >= 0");
    if (!(m.rho >= 0.0 && m.rho <= 1.0)) add(r, "rho", -1, -1, "discount must lie in [0,1]");
    return r;
}

void require_valid(const DetectionModel& m) {
    auto r = validate_model(m);
    if (!r.ok()) throw Error(Errc::validation, "invalid model:\n" + r.to_string());
}

void clamp_tiny_negatives(DetectionModel& m) {
    auto clamp = [](double& x) {
        if (x < 0.0 && x >= -kNegClamp) x = 0.0;
    };
    for (std::size_t i = 0; i < m.P.rows(); ++i)
        for (std::size_t j = 0; j < m.P.cols(); ++j) clamp(m.P(i, j));
    for (std::size_t i = 0; i < m.B.rows(); ++i)
        for (std::size_t j = 0; j < m.B.cols(); ++j) clamp(m.B(i, j));
    for (double& x : m.pi0) clamp(x);
}

Vec transformed_cost(const DetectionModel& m) {
    Vec Pf = mat_vec(m.P, m.f);
    Vec C(static_cast<std::size_t>(m.X));
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = -m.f[i] + m.rho * Pf[i];
    C[0] += m.d;
    return C;
}

Matrix ph_transient_block(const DetectionModel& m) {
    const std::size_t n = static_cast<std::size_t>(m.X) - 1;
    Matrix Pbar(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Pbar(i, j) = m.P(i + 1, j + 1);
    return Pbar;
}

Vec ph_absorption_column(const DetectionModel& m) {
    Vec Plow(static_cast<std::size_t>(m.X) - 1);
    for (std::size_t i = 0; i < Plow.size(); ++i) Plow[i] = m.P(i + 1, 0);
    return Plow;
}

Vec ph_pmf_table(const DetectionModel& m, int K) {
    Vec out(static_cast<std::size_t>(K) + 1, 0.0);
    out[0] = m.pi0[0];
    Matrix Pbar = ph_transient_block(m);
    Vec Plow = ph_absorption_column(m);
    Vec v(m.pi0.begin() + 1, m.pi0.end());
    for (int k = 1; k <= K; ++k) {
        out[static_cast<std::size_t>(k)] = dot(v, Plow);
        v = vec_mat(v, Pbar);
    }
    return out;
}

double ph_pmf(const DetectionModel& m, int k) {
    if (k < 0) throw Error(Errc::invalid_argument, "ph_pmf: k must be >= 0");
    return ph_pmf_table(m, k)[static_cast<std::size_t>(k)];
}

bool change_time_finite(const DetectionModel& m) {
    Matrix A = ph_transient_block(m);
    double K = 1.0;
    for (int s = 0; s < 64; ++s) {
        double n = norm_inf(A);
        if (n == 0.0 || std::pow(n, 1.0 / K) < 1.0 - 1e-12) return true;
        A = matmul(A, A);
        K *= 2.0;
    }
    return false;
}

long sample_change_time(const DetectionModel& m, Rng& rng) {
    if (!change_time_finite(m)) throw Error(Errc::numeric, "change time may be infinite");
    std::size_t x = draw_index(m.pi0, rng);
    long k = 0;
    while (x != 0) {
        x = draw_index(m.P.row(x), rng);
        ++k;
    }
    return k;
}

}  // namespace sqd
