#include <zoalm/problems.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace zoalm {

double InstanceData::scalar(const std::string &key) const {
    auto it = scalars.find(key);
    if (it == scalars.end())
        throw ConfigError("instance '" + kind + "' is missing scalar '" + key + "'");
    return it->second;
}

const Matrix &InstanceData::matrix(const std::string &key) const {
    auto it = matrices.find(key);
    if (it == matrices.end())
        throw ConfigError("instance '" + kind + "' is missing matrix '" + key + "'");
    return it->second;
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> g;
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = g(rng);
    return M;
}

Matrix uniform_matrix(Index rows, Index cols, double lo, double hi, Rng &rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = u(rng);
    return M;
}

/// Symmetric matrix with eigenvalues lo, hi and n-2 uniform draws between.
Matrix pinned_spectrum_matrix(Index n, double lo, double hi, Rng &rng) {
    if (lo == hi)
        return lo * Matrix::Identity(n, n);
    Vector spec = uniform_matrix(n, 1, lo, hi, rng);
    spec(0)     = lo;
    if (n > 1)
        spec(n - 1) = hi;
    const Matrix U = Eigen::HouseholderQR<Matrix>(gaussian_matrix(n, n, rng)).householderQ();
    Matrix Q       = U * spec.asDiagonal() * U.transpose();
    return 0.5 * (Q + Q.transpose());
}

void require(bool ok, const std::string &msg) {
    if (!ok)
        throw InputError(msg);
}

BlackBoxOracle quadratic_oracle(const Matrix &Q, const Vector &c, std::shared_ptr<QueryLedger> ledger) {
    return BlackBoxOracle::primitive(
        c.size(), [Q, c](const Vector &x) { return 0.5 * x.dot(Q * x) + c.dot(x); },
        [Q, c](const Vector &x) { return Vector(Q * x + c); }, std::move(ledger));
}

double spectral_norm(const Matrix &Q) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

ProblemInstance build_quadratic(const InstanceData &data, bool strongly_convex) {
    ProblemInstance inst;
    inst.data        = data;
    inst.name        = data.kind;
    const Matrix &Q  = data.matrix("Q");
    const Vector c   = data.matrix("c").col(0);
    auto ledger      = std::make_shared<QueryLedger>();
    inst.problem.g   = quadratic_oracle(Q, c, ledger);
    const Index n    = c.size();
    inst.x0          = Vector::Zero(n);
    inst.problem.constants.L0 = spectral_norm(Q);
    if (strongly_convex) {
        inst.mu               = data.scalar("mu");
        inst.problem.h        = SeparableTerm::zero(n);
        inst.x_star           = Vector(-Q.ldlt().solve(c));
        inst.f_star           = 0.5 * inst.x_star->dot(Q * *inst.x_star) + c.dot(*inst.x_star);
        inst.problem.constants.rho0 = 0;
    } else {
        inst.problem.constants.rho0 = data.scalar("rho");
        const double box            = data.scalar("box");
        inst.problem.h              = SeparableTerm::box(n, -box, box);
    }
    return inst;
}

ProblemInstance build_lcqp(const InstanceData &data) {
    auto inst      = build_quadratic(data, false);
    const Matrix A = data.matrix("A");
    const Vector b = data.matrix("b").col(0);
    auto ledger    = inst.problem.g.ledger_ptr();
    auto &k        = inst.problem.constants;
    for (Index i = 0; i < A.rows(); ++i) {
        const Vector a  = A.row(i).transpose();
        const double bi = b(i);
        inst.problem.c.push_back(BlackBoxOracle::primitive(
            A.cols(), [a, bi](const Vector &x) { return a.dot(x) - bi; },
            [a](const Vector &) { return a; }, ledger));
        k.rho.push_back(0.0);
        k.L.push_back(0.0);
        k.B.push_back(a.norm());
    }
    return inst;
}

double log1pexp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
double sigmoid(double t) {
    if (t >= 0)
        return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

ProblemInstance build_logistic(const InstanceData &data) {
    ProblemInstance inst;
    inst.data        = data;
    inst.name        = data.kind;
    const Matrix &X  = data.matrix("X");
    const Vector y   = data.matrix("y").col(0);
    const double lam = data.scalar("lambda");
    require(lam > 0, "logistic: lambda must be positive");
    const Index N = X.rows(), d = X.cols() + 1;
    Matrix Xa(N, d);
    Xa << X, Vector::Ones(N);
    auto value = [Xa, y, lam](const Vector &wb) {
        const Vector z = Xa * wb;
        double s       = 0;
        for (Index i = 0; i < z.size(); ++i)
            s += log1pexp(-y(i) * z(i));
        return s / static_cast<double>(z.size()) + 0.5 * lam * wb.squaredNorm();
    };
    auto grad = [Xa, y, lam](const Vector &wb) {
        const Vector z = Xa * wb;
        Vector r(z.size());
        for (Index i = 0; i < z.size(); ++i)
            r(i) = -y(i) * sigmoid(-y(i) * z(i));
        return Vector(Xa.transpose() * r / static_cast<double>(z.size()) + lam * wb);
    };
    inst.problem.g    = BlackBoxOracle::primitive(d, value, grad);
    inst.problem.h    = SeparableTerm::zero(d);
    inst.x0           = Vector::Zero(d);
    inst.mu           = lam;
    const double sx   = Xa.jacobiSvd().singularValues()(0);
    inst.problem.constants.L0   = lam + sx * sx / (4.0 * static_cast<double>(N));
    inst.problem.constants.rho0 = 0;
    return inst;
}

ProblemInstance build_sensor(const InstanceData &data) {
    ProblemInstance inst;
    inst.data        = data;
    inst.name        = data.kind;
    const Matrix &H  = data.matrix("H");
    const Matrix &P  = data.matrix("Rinv");
    const double lam = data.scalar("lambda");
    const Index d    = H.rows();

    auto inner = [H, P](const Vector &w) {
        const Matrix G = w.asDiagonal() * H;
        Matrix S       = G.transpose() * P * G;
        S.diagonal().array() += 1.0;
        return S;
    };
    auto value = [inner, lam](const Vector &w) {
        const Eigen::LLT<Matrix> llt(inner(w));
        if (llt.info() != Eigen::Success)
            throw NumericError("sensor: inner matrix is not positive definite");
        Matrix Linv = Matrix::Identity(w.size(), w.size());
        llt.matrixL().solveInPlace(Linv);
        return Linv.squaredNorm() + lam * w.sum();
    };
    auto grad = [inner, H, P, lam](const Vector &w) {
        const Eigen::LLT<Matrix> llt(inner(w));
        if (llt.info() != Eigen::Success)
            throw NumericError("sensor: inner matrix is not positive definite");
        const Matrix Sinv = llt.solve(Matrix::Identity(w.size(), w.size()));
        const Matrix T    = H * Sinv * Sinv * H.transpose();
        return Vector(-2.0 * (T.cwiseProduct(P) * w) + Vector::Constant(w.size(), lam));
    };
    inst.problem.g = BlackBoxOracle::primitive(d, value, grad);
    auto ledger    = inst.problem.g.ledger_ptr();
    auto &k        = inst.problem.constants;
    k.rho0         = data.scalar("rho0");
    k.L0           = data.scalar("L0");
    for (Index i = 0; i < d; ++i) {
        inst.problem.c.push_back(BlackBoxOracle::primitive(
            d, [i](const Vector &w) { return w(i) * w(i) - w(i); },
            [i, d](const Vector &w) {
                Vector g = Vector::Zero(d);
                g(i)     = 2.0 * w(i) - 1.0;
                return g;
            },
            ledger));
        k.rho.push_back(2.0);
        k.L.push_back(2.0);
        k.B.push_back(1.0); // |2w - 1| <= 1 on [0, 1]
    }
    inst.problem.h = SeparableTerm::box(d, 0.0, 1.0);
    inst.x0        = Vector::Constant(d, 0.5);
    return inst;
}

} // namespace

ProblemInstance gen_lcqp(Index n, Index m, double rho, std::uint64_t seed, double L) {
    require(n > m && m >= 1, "lcqp needs n > m >= 1");
    require(rho > 0 && L >= rho, "lcqp needs 0 < rho <= L");
    Rng rng = make_rng(seed);
    InstanceData d;
    d.kind    = "lcqp";
    d.seed    = seed;
    d.scalars = {{"n", double(n)}, {"m", double(m)}, {"rho", rho}, {"L", L}, {"box", 5.0}};
    d.matrices["Q"] = pinned_spectrum_matrix(n, -rho, L, rng);
    d.matrices["c"] = gaussian_matrix(n, 1, rng);
    Matrix A;
    for (int attempt = 0;; ++attempt) {
        A = gaussian_matrix(m, n, rng);
        if (Eigen::FullPivLU<Matrix>(A).rank() == m)
            break;
        if (attempt == 20)
            throw NumericError("lcqp: could not draw a full-row-rank A");
    }
    const Vector x_feas = uniform_matrix(n, 1, -2.5, 2.5, rng);
    d.matrices["A"]     = A;
    d.matrices["b"]     = A * x_feas;
    d.matrices["x_feas"] = x_feas;
    return build_instance(d);
}

ProblemInstance gen_uscqp(Index n, double mu, std::uint64_t seed, double L) {
    require(n >= 1, "uscqp needs n >= 1");
    require(mu > 0 && L >= mu, "uscqp needs 0 < mu <= L");
    Rng rng = make_rng(seed);
    InstanceData d;
    d.kind          = "uscqp";
    d.seed          = seed;
    d.scalars       = {{"n", double(n)}, {"mu", mu}, {"L", L}};
    d.matrices["Q"] = pinned_spectrum_matrix(n, mu, L, rng);
    d.matrices["c"] = gaussian_matrix(n, 1, rng);
    return build_instance(d);
}

ProblemInstance gen_wcqp(Index n, double rho, std::uint64_t seed, double L, double box) {
    require(n >= 2, "wcqp needs n >= 2");
    require(rho > 0 && L >= rho && box > 0, "wcqp needs 0 < rho <= L and box > 0");
    Rng rng = make_rng(seed);
    InstanceData d;
    d.kind          = "wcqp";
    d.seed          = seed;
    d.scalars       = {{"n", double(n)}, {"rho", rho}, {"L", L}, {"box", box}};
    d.matrices["Q"] = pinned_spectrum_matrix(n, -rho, L, rng);
    d.matrices["c"] = gaussian_matrix(n, 1, rng);
    return build_instance(d);
}

ProblemInstance gen_logistic(Index N, Index features, double lambda, std::uint64_t seed,
                             double scale, double flip) {
    require(N >= 1 && features >= 1, "logistic needs N >= 1 and at least one feature");
    require(lambda > 0, "logistic: lambda must be positive");
    require(flip >= 0 && flip <= 1, "logistic: flip fraction must lie in [0, 1]");
    Rng rng          = make_rng(seed);
    const Matrix X   = scale * gaussian_matrix(N, features, rng);
    const Vector w   = gaussian_matrix(features, 1, rng);
    const double b   = std::normal_distribution<double>()(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector y(N);
    for (Index i = 0; i < N; ++i) {
        y(i) = X.row(i).dot(w) + b >= 0 ? 1.0 : -1.0;
        if (u(rng) < flip)
            y(i) = -y(i);
    }
    InstanceData d;
    d.kind          = "logistic";
    d.seed          = seed;
    d.scalars       = {{"N", double(N)}, {"lambda", lambda}, {"scale", scale}, {"flip", flip}};
    d.matrices["X"] = X;
    d.matrices["y"] = y;
    return build_instance(d);
}

ProblemInstance load_logistic(std::istream &is, double lambda, Index N, std::uint64_t seed,
                              bool has_header, const std::string &source) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0, width = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (has_header && lineno == 1)
            continue;
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos)
                    throw std::invalid_argument("trailing characters");
            } catch (const std::exception &) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": cannot parse '" + cell +
                                  "' as a number");
            }
        }
        if (row.size() < 2)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": need a label and a feature");
        if (width == 0)
            width = row.size();
        if (row.size() != width)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(width) + " columns, got " + std::to_string(row.size()));
        if (row[0] != 1.0 && row[0] != -1.0)
            throw InputError(source + ":" + std::to_string(lineno) + ": label must be +1 or -1");
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ConfigError(source + ": no data rows");
    require(N >= 1 && static_cast<std::size_t>(N) <= rows.size(),
            "logistic: N must lie in [1, number of rows]");
    Rng rng = make_rng(seed);
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    const Index f = static_cast<Index>(width - 1);
    Matrix X(N, f);
    Vector y(N);
    for (Index i = 0; i < N; ++i) {
        const auto &r = rows[idx[static_cast<std::size_t>(i)]];
        y(i)          = r[0];
        for (Index j = 0; j < f; ++j)
            X(i, j) = r[static_cast<std::size_t>(j) + 1];
    }
    InstanceData d;
    d.kind          = "logistic";
    d.seed          = seed;
    d.scalars       = {{"N", double(N)}, {"lambda", lambda}};
    d.matrices["X"] = X;
    d.matrices["y"] = y;
    return build_instance(d);
}

ProblemInstance load_logistic(const std::string &path, double lambda, Index N, std::uint64_t seed,
                              bool has_header) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open dataset '" + path + "'");
    return load_logistic(in, lambda, N, seed, has_header, path);
}

ProblemInstance gen_sensor(Index d, double lambda, std::uint64_t seed) {
    require(d >= 2, "sensor needs d >= 2");
    require(lambda >= 0, "sensor: lambda must be nonnegative");
    Rng rng          = make_rng(seed);
    const Matrix Hb  = uniform_matrix(d, d, 0.0, 1.0, rng);
    const Matrix Rb  = uniform_matrix(d, d, 0.0, 1e-3, rng);
    InstanceData data;
    data.kind             = "sensor";
    data.seed             = seed;
    // Hessian of tr(S^-1) over [0,1]^d has eigenvalues within about [-0.005, 0.03]
    // for d <= 80 at this noise scale; the constants below carry a safety margin.
    data.scalars          = {{"d", double(d)}, {"lambda", lambda}, {"rho0", 0.01}, {"L0", 0.05}};
    data.matrices["H"]    = 0.5 * (Hb + Hb.transpose());
    // R is the inverse of sym(Rb), so the oracle only needs sym(Rb).
    data.matrices["Rinv"] = 0.5 * (Rb + Rb.transpose());
    return build_instance(data);
}

ProblemInstance build_instance(const InstanceData &data) {
    ProblemInstance inst;
    if (data.kind == "lcqp")
        inst = build_lcqp(data);
    else if (data.kind == "uscqp")
        inst = build_quadratic(data, true);
    else if (data.kind == "wcqp")
        inst = build_quadratic(data, false);
    else if (data.kind == "logistic")
        inst = build_logistic(data);
    else if (data.kind == "sensor")
        inst = build_sensor(data);
    else
        throw ConfigError("unknown problem kind '" + data.kind + "'");
    inst.problem.validate();
    return inst;
}

namespace {

double param(const std::map<std::string, double> &p, const std::string &key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

Index index_param(const std::map<std::string, double> &p, const std::string &key, double fallback) {
    const double v = param(p, key, fallback);
    if (v != std::floor(v) || v < 0)
        throw ConfigError("problem parameter '" + key + "' must be a nonnegative integer");
    return static_cast<Index>(v);
}

} // namespace

ProblemInstance make_problem(const std::string &kind, const std::map<std::string, double> &p,
                             std::uint64_t seed, const std::string &dataset_path) {
    if (kind == "lcqp")
        return gen_lcqp(index_param(p, "n", 100), index_param(p, "m", 10), param(p, "rho", 1.0), seed,
                        param(p, "L", 10.0));
    if (kind == "uscqp")
        return gen_uscqp(index_param(p, "n", 100), param(p, "mu", 1.0), seed, param(p, "L", 14.0));
    if (kind == "wcqp")
        return gen_wcqp(index_param(p, "n", 20), param(p, "rho", 1.0), seed, param(p, "L", 10.0),
                        param(p, "box", 1.0));
    if (kind == "logistic") {
        if (!dataset_path.empty())
            return load_logistic(dataset_path, param(p, "lambda", 1.0), index_param(p, "N", 100), seed,
                                 param(p, "header", 0.0) != 0.0);
        return gen_logistic(index_param(p, "N", 100), index_param(p, "features", 57),
                            param(p, "lambda", 1.0), seed, param(p, "scale", 9.0),
                            param(p, "flip", 0.05));
    }
    if (kind == "sensor")
        return gen_sensor(index_param(p, "d", 80), param(p, "lambda", 0.5), seed);
    throw ConfigError("unknown problem kind '" + kind + "'");
}

void write_instance(std::ostream &os, const InstanceData &data) {
    nlohmann::ordered_json j;
    j["kind"]    = data.kind;
    j["seed"]    = data.seed;
    j["scalars"] = data.scalars;
    auto &mats   = j["matrices"];
    mats         = nlohmann::ordered_json::object();
    for (const auto &[name, M] : data.matrices) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(M.size()));
        for (Index r = 0; r < M.rows(); ++r)
            for (Index c = 0; c < M.cols(); ++c)
                flat.push_back(M(r, c));
        mats[name] = {{"rows", M.rows()}, {"cols", M.cols()}, {"data", flat}};
    }
    os << j.dump(1) << '\n';
}

InstanceData read_instance(std::istream &is) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("instance file is not valid JSON: ") + e.what());
    }
    InstanceData d;
    try {
        d.kind    = j.at("kind").get<std::string>();
        d.seed    = j.at("seed").get<std::uint64_t>();
        d.scalars = j.at("scalars").get<std::map<std::string, double>>();
        for (const auto &[name, m] : j.at("matrices").items()) {
            const auto rows = m.at("rows").get<Index>();
            const auto cols = m.at("cols").get<Index>();
            const auto flat = m.at("data").get<std::vector<double>>();
            if (rows < 0 || cols < 0 || static_cast<Index>(flat.size()) != rows * cols)
                throw ConfigError("matrix '" + name + "' has inconsistent shape");
            Matrix M(rows, cols);
            for (Index r = 0; r < rows; ++r)
                for (Index c = 0; c < cols; ++c)
                    M(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
            d.matrices[name] = std::move(M);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("instance file: ") + e.what());
    }
    return d;
}

} // namespace zoalm
