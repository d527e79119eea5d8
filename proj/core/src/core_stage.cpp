#include "mpirecon/core_stage.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mpirecon/error.hpp"

namespace mpirecon {

namespace {

constexpr double kDomainArea = 4.0;

// Flat layout shared with CoeffTensor: index (k*M + l)*4 + e, e = 2*row + col.
Eigen::VectorXd flatten(const CoeffTensor& c) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(4 * c.modes()));
    for (std::size_t i = 0; i < c.modes(); ++i) {
        const auto& a = c[i];
        const auto b = static_cast<Eigen::Index>(4 * i);
        x[b] = a.a11;
        x[b + 1] = a.a12;
        x[b + 2] = a.a21;
        x[b + 3] = a.a22;
    }
    return x;
}

CoeffTensor unflatten(const Eigen::VectorXd& x, std::size_t n, std::size_t m) {
    CoeffTensor c(n, m);
    for (std::size_t i = 0; i < c.modes(); ++i) {
        const auto b = static_cast<Eigen::Index>(4 * i);
        c[i] = {x[b], x[b + 1], x[b + 2], x[b + 3]};
    }
    return c;
}

Eigen::MatrixXd signals_matrix(const std::vector<Vec2>& s) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(s.size()), 2);
    for (std::size_t l = 0; l < s.size(); ++l) {
        out(static_cast<Eigen::Index>(l), 0) = s[l][0];
        out(static_cast<Eigen::Index>(l), 1) = s[l][1];
    }
    return out;
}

std::vector<Vec2> to_vec2(const Eigen::MatrixXd& p) {
    std::vector<Vec2> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index l = 0; l < p.rows(); ++l) out[static_cast<std::size_t>(l)] = {p(l, 0), p(l, 1)};
    return out;
}

Eigen::VectorXd expanded_weights(std::size_t n, std::size_t m, int order) {
    const auto w = regularizer_weights(n, m, order);
    Eigen::VectorXd out(static_cast<Eigen::Index>(4 * w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
        out.segment<4>(static_cast<Eigen::Index>(4 * i)).setConstant(w[i]);
    return out;
}

}  // namespace

struct CoreOperator::Impl {
    std::size_t n = 0;
    std::size_t m = 0;
    Eigen::MatrixXd tx;  // N x L, normalized x-cosines at the sample positions
    Eigen::MatrixXd ty;  // M x L
    Eigen::MatrixXd v;   // L x 2 velocities

    Impl(const ScanGeometry& geom, std::size_t n_, std::size_t m_) : n(n_), m(m_) {
        geom.validate();
        detail::require(n > 0 && m > 0, "CoreOperator: truncation must be positive");
        const auto L = static_cast<Eigen::Index>(geom.size());
        std::vector<double> xs(geom.size()), ys(geom.size());
        v.resize(L, 2);
        for (std::size_t l = 0; l < geom.size(); ++l) {
            xs[l] = geom.positions[l][0];
            ys[l] = geom.positions[l][1];
            v(static_cast<Eigen::Index>(l), 0) = geom.velocities[l][0];
            v(static_cast<Eigen::Index>(l), 1) = geom.velocities[l][1];
        }
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const auto txv = cos_table(n, xs);
        const auto tyv = cos_table(m, ys);
        tx = Eigen::Map<const RowMajor>(txv.data(), static_cast<Eigen::Index>(n), L);
        ty = Eigen::Map<const RowMajor>(tyv.data(), static_cast<Eigen::Index>(m), L);
    }

    Eigen::Index samples() const { return v.rows(); }

    // P (L x 2) with P(l, r) = sum_m u_m(r_l) sum_c X[m, 2r+c] v(l, c).
    Eigen::MatrixXd predict(const Eigen::VectorXd& x) const {
        const auto N = static_cast<Eigen::Index>(n);
        const auto M = static_cast<Eigen::Index>(m);
        Eigen::MatrixXd stacked(4 * N, M);
        for (Eigen::Index k = 0; k < N; ++k)
            for (Eigen::Index l = 0; l < M; ++l)
                for (Eigen::Index e = 0; e < 4; ++e) stacked(e * N + k, l) = x[(k * M + l) * 4 + e];
        const Eigen::MatrixXd y = stacked * ty;  // 4N x L
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(samples(), 2);
        for (Eigen::Index e = 0; e < 4; ++e) {
            const Eigen::VectorXd g =
                (tx.array() * y.middleRows(e * N, N).array()).colwise().sum().transpose();
            p.col(e / 2).array() += g.array() * v.col(e % 2).array();
        }
        return p;
    }

    // Adjoint of predict for residuals E (L x 2).
    Eigen::VectorXd adjoint(const Eigen::MatrixXd& res) const {
        const auto N = static_cast<Eigen::Index>(n);
        const auto M = static_cast<Eigen::Index>(m);
        Eigen::MatrixXd scaled(4 * N, samples());
        for (Eigen::Index e = 0; e < 4; ++e) {
            const Eigen::ArrayXd w = res.col(e / 2).array() * v.col(e % 2).array();
            scaled.middleRows(e * N, N) = (tx.array().rowwise() * w.transpose()).matrix();
        }
        const Eigen::MatrixXd g = scaled * ty.transpose();  // 4N x M
        Eigen::VectorXd out(4 * N * M);
        for (Eigen::Index k = 0; k < N; ++k)
            for (Eigen::Index l = 0; l < M; ++l)
                for (Eigen::Index e = 0; e < 4; ++e) out[(k * M + l) * 4 + e] = g(e * N + k, l);
        return out;
    }

    Eigen::VectorXd normal_diagonal() const {
        const auto N = static_cast<Eigen::Index>(n);
        const auto M = static_cast<Eigen::Index>(m);
        const Eigen::ArrayXXd tx2 = tx.array().square();
        const Eigen::MatrixXd ty2 = ty.array().square().matrix().transpose();  // L x M
        Eigen::VectorXd out(4 * N * M);
        for (Eigen::Index c = 0; c < 2; ++c) {
            const Eigen::ArrayXd w = v.col(c).array().square();
            const Eigen::MatrixXd d = (tx2.rowwise() * w.transpose()).matrix() * ty2;  // N x M
            for (Eigen::Index k = 0; k < N; ++k)
                for (Eigen::Index l = 0; l < M; ++l) {
                    out[(k * M + l) * 4 + c] = d(k, l);
                    out[(k * M + l) * 4 + 2 + c] = d(k, l);
                }
        }
        return out;
    }
};

CoreOperator::CoreOperator(const ScanGeometry& geom, std::size_t n, std::size_t m)
    : impl_(std::make_unique<Impl>(geom, n, m)) {}
CoreOperator::~CoreOperator() = default;
CoreOperator::CoreOperator(CoreOperator&&) noexcept = default;
CoreOperator& CoreOperator::operator=(CoreOperator&&) noexcept = default;

std::size_t CoreOperator::n() const { return impl_->n; }
std::size_t CoreOperator::m() const { return impl_->m; }
std::size_t CoreOperator::samples() const { return static_cast<std::size_t>(impl_->samples()); }

std::vector<Vec2> CoreOperator::predict(const CoeffTensor& coeffs) const {
    detail::require(coeffs.n() == impl_->n && coeffs.m() == impl_->m,
                    "CoreOperator::predict: truncation mismatch");
    return to_vec2(impl_->predict(flatten(coeffs)));
}

CoeffTensor CoreOperator::adjoint(const std::vector<Vec2>& residuals) const {
    detail::require(residuals.size() == samples(), "CoreOperator::adjoint: sample count mismatch");
    return unflatten(impl_->adjoint(signals_matrix(residuals)), impl_->n, impl_->m);
}

CoeffTensor CoreOperator::normal_diagonal() const {
    return unflatten(impl_->normal_diagonal(), impl_->n, impl_->m);
}

void CoreProblem::validate() const {
    scan.validate();
    detail::require(n > 0 && m > 0, "CoreProblem: truncation must be positive");
    detail::require(order == 1 || order == 2, "CoreProblem: order must be 1 or 2");
    detail::require(std::isfinite(lambda) && lambda > 0.0, "CoreProblem: lambda must be positive");
    detail::require(ridge >= 0.0, "CoreProblem: ridge must be non-negative");
    detail::require(tol > 0.0, "CoreProblem: tolerance must be positive");
    detail::require(max_iter > 0, "CoreProblem: max_iter must be positive");
}

std::vector<double> regularizer_weights(std::size_t n, std::size_t m, int order) {
    std::vector<double> w(n * m);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < m; ++l)
            w[k * m + l] = regularizer_weight({static_cast<int>(k), static_cast<int>(l)}, order);
    return w;
}

std::vector<Vec2> predict(const CoeffTensor& coeffs, const ScanGeometry& geom) {
    return CoreOperator(geom, coeffs.n(), coeffs.m()).predict(coeffs);
}

double energy(const CoeffTensor& coeffs, const CoreProblem& problem) {
    problem.validate();
    detail::require(coeffs.n() == problem.n && coeffs.m() == problem.m, "energy: truncation mismatch");
    const auto w = regularizer_weights(problem.n, problem.m, problem.order);
    double reg = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) reg += w[i] * coeffs[i].frobenius_sq();
    const auto p = predict(coeffs, problem.scan.geometry);
    double fit = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) {
        const double dx = problem.scan.signals[l][0] - p[l][0];
        const double dy = problem.scan.signals[l][1] - p[l][1];
        fit += dx * dx + dy * dy;
    }
    return problem.lambda / (2.0 * kDomainArea) * reg +
           fit / (2.0 * static_cast<double>(p.size()));
}

CoeffTensor apply_core_hessian(const CoreOperator& op, const CoeffTensor& coeffs,
                               const CoreProblem& problem) {
    detail::require(coeffs.n() == op.n() && coeffs.m() == op.m(),
                    "apply_core_hessian: truncation mismatch");
    const auto w = expanded_weights(op.n(), op.m(), problem.order);
    const double inv_l = 1.0 / static_cast<double>(op.samples());
    const Eigen::VectorXd x = flatten(coeffs);
    Eigen::VectorXd hx = flatten(op.adjoint(op.predict(coeffs))) * inv_l;
    hx.array() += (problem.lambda / kDomainArea * w.array() + problem.ridge) * x.array();
    return unflatten(hx, op.n(), op.m());
}

CoeffTensor gradient(const CoeffTensor& coeffs, const CoreProblem& problem) {
    problem.validate();
    CoreOperator op(problem.scan.geometry, problem.n, problem.m);
    auto g = apply_core_hessian(op, coeffs, problem);
    auto b = op.adjoint(problem.scan.signals);
    b *= 1.0 / static_cast<double>(op.samples());
    g -= b;
    return g;
}

CoreSolution solve_core(const CoreProblem& problem) {
    problem.validate();
    CoreOperator op(problem.scan.geometry, problem.n, problem.m);
    return solve_core(problem, op);
}

CoreSolution solve_core(const CoreProblem& problem, const CoreOperator& op) {
    problem.validate();
    detail::require(op.n() == problem.n && op.m() == problem.m && op.samples() == problem.scan.size(),
                    "solve_core: operator does not match the problem");
    const double inv_l = 1.0 / static_cast<double>(op.samples());
    const std::size_t n = problem.n;
    const std::size_t m = problem.m;
    const Eigen::VectorXd shift =
        problem.lambda / kDomainArea * expanded_weights(n, m, problem.order).array() + problem.ridge;
    const auto hessian = [&](const Eigen::VectorXd& x) {
        const auto c = unflatten(x, n, m);
        Eigen::VectorXd hx = flatten(op.adjoint(op.predict(c))) * inv_l;
        hx.array() += shift.array() * x.array();
        return hx;
    };
    Eigen::VectorXd precond = Eigen::VectorXd::Ones(shift.size());
    if (problem.jacobi_preconditioner)
        precond = (flatten(op.normal_diagonal()) * inv_l + shift).cwiseInverse();

    double signal_sq = 0.0;
    for (const auto& s : problem.scan.signals) signal_sq += s[0] * s[0] + s[1] * s[1];
    const double energy_offset = 0.5 * inv_l * signal_sq;

    const Eigen::VectorXd b = flatten(op.adjoint(problem.scan.signals)) * inv_l;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    const double b_norm = b.norm();

    CoreSolution sol;
    sol.initial_residual = b_norm;
    sol.final_residual = b_norm;
    sol.energy = energy_offset;
    sol.log.push_back({0, b_norm, energy_offset});
    if (b_norm == 0.0) {
        sol.coeffs = CoeffTensor(n, m);
        sol.converged = true;
        return sol;
    }

    Eigen::VectorXd z = precond.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= problem.max_iter; ++it) {
        const Eigen::VectorXd hp = hessian(p);
        const double curvature = p.dot(hp);
        if (!(curvature > 0.0) || !std::isfinite(curvature))
            throw NumericalError("core solver: Hessian lost positive definiteness");
        const double alpha = rz / curvature;
        x += alpha * p;
        r -= alpha * hp;
        const double r_norm = r.norm();
        // Quadratic energy from the residual: E = -x^T (b + r) / 2 + const.
        const double e = -0.5 * x.dot(b + r) + energy_offset;
        sol.iterations = it;
        sol.final_residual = r_norm;
        sol.energy = e;
        sol.log.push_back({it, r_norm, e});
        if (!std::isfinite(r_norm)) throw NumericalError("core solver: non-finite residual");
        if (r_norm <= problem.tol * b_norm) {
            sol.converged = true;
            break;
        }
        z = precond.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    sol.coeffs = unflatten(x, n, m);
    return sol;
}

ScalarField trace_field(const CoeffTensor& coeffs, std::size_t nx, std::size_t ny) {
    std::vector<double> t(coeffs.modes());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = coeffs[i].trace();
    return synthesize_scalar(t, coeffs.n(), coeffs.m(), nx, ny);
}

struct CoreDirectSolver::Impl {
    CoreOperator op;
    std::vector<double> weights;
    Eigen::MatrixXd gram;  // (Phi Phi^T) o (V V^T), Phi scaled by 1/sqrt(w), constant mode excluded
    Eigen::MatrixXd b0;    // L x 2, constant-mode columns u_0 v_l
    double ridge;

    Impl(const ScanGeometry& geom, std::size_t n, std::size_t m, int order, double ridge_)
        : op(geom, n, m), weights(regularizer_weights(n, m, order)), ridge(ridge_) {
        const auto L = static_cast<Eigen::Index>(geom.size());
        std::vector<double> xs(geom.size()), ys(geom.size());
        Eigen::MatrixXd v(L, 2);
        for (std::size_t l = 0; l < geom.size(); ++l) {
            xs[l] = geom.positions[l][0];
            ys[l] = geom.positions[l][1];
            v(static_cast<Eigen::Index>(l), 0) = geom.velocities[l][0];
            v(static_cast<Eigen::Index>(l), 1) = geom.velocities[l][1];
        }
        const auto tx = cos_table(n, xs);
        const auto ty = cos_table(m, ys);
        Eigen::MatrixXd phi_gram = Eigen::MatrixXd::Zero(L, L);
        Eigen::MatrixXd block(L, static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                const double w = weights[k * m + j];
                const double scale = (k == 0 && j == 0) ? 0.0 : 1.0 / std::sqrt(w);
                for (std::size_t l = 0; l < geom.size(); ++l)
                    block(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) =
                        scale * tx[k * geom.size() + l] * ty[j * geom.size() + l];
            }
            phi_gram.selfadjointView<Eigen::Lower>().rankUpdate(block);
        }
        gram = phi_gram.selfadjointView<Eigen::Lower>();
        gram.array() *= (v * v.transpose()).array();
        b0 = cos_norm({0, 0}) * v;
    }
};

CoreDirectSolver::CoreDirectSolver(const ScanGeometry& geom, std::size_t n, std::size_t m,
                                   int order, double ridge) {
    geom.validate();
    detail::require(n > 0 && m > 0, "CoreDirectSolver: truncation must be positive");
    detail::require(order == 1 || order == 2, "CoreDirectSolver: order must be 1 or 2");
    detail::require(ridge >= 0.0, "CoreDirectSolver: ridge must be non-negative");
    impl_ = std::make_unique<Impl>(geom, n, m, order, ridge);
}
CoreDirectSolver::~CoreDirectSolver() = default;
CoreDirectSolver::CoreDirectSolver(CoreDirectSolver&&) noexcept = default;
CoreDirectSolver& CoreDirectSolver::operator=(CoreDirectSolver&&) noexcept = default;

std::vector<CoeffTensor> CoreDirectSolver::solve(const std::vector<std::vector<Vec2>>& signal_sets,
                                                 double lambda) const {
    detail::require(std::isfinite(lambda) && lambda > 0.0, "CoreDirectSolver: lambda must be positive");
    const auto& d = *impl_;
    const auto L = d.gram.rows();
    const double gram_scale = kDomainArea / lambda;
    Eigen::MatrixXd s = gram_scale * d.gram;
    s.diagonal().array() += static_cast<double>(L);
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("CoreDirectSolver: factorization failed");
    const Eigen::MatrixXd s_inv_b0 = llt.solve(d.b0);
    Eigen::Matrix2d schur = d.b0.transpose() * s_inv_b0;
    schur.diagonal().array() += d.ridge;
    const Eigen::LDLT<Eigen::Matrix2d> schur_ldlt(schur);

    std::vector<CoeffTensor> out;
    out.reserve(signal_sets.size());
    for (const auto& signals : signal_sets) {
        detail::require(static_cast<Eigen::Index>(signals.size()) == L,
                        "CoreDirectSolver: sample count mismatch");
        const Eigen::MatrixXd rhs = signals_matrix(signals);  // column r = matrix row r
        const Eigen::MatrixXd s_inv_rhs = llt.solve(rhs);
        const Eigen::Matrix2d x0 = schur_ldlt.solve(d.b0.transpose() * s_inv_rhs);  // col r
        const Eigen::MatrixXd y = s_inv_rhs - s_inv_b0 * x0;
        auto coeffs = d.op.adjoint(to_vec2(y));
        for (std::size_t i = 1; i < coeffs.modes(); ++i) {
            const double f = gram_scale / d.weights[i];
            auto& a = coeffs[i];
            a.a11 *= f;
            a.a12 *= f;
            a.a21 *= f;
            a.a22 *= f;
        }
        coeffs[0] = {x0(0, 0), x0(1, 0), x0(0, 1), x0(1, 1)};
        out.push_back(std::move(coeffs));
    }
    return out;
}

CoeffTensor CoreDirectSolver::solve(const std::vector<Vec2>& signals, double lambda) const {
    return solve(std::vector<std::vector<Vec2>>{signals}, lambda).front();
}

}  // namespace mpirecon
