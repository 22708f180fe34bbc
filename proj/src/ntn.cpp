#include "vrel/ntn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace vrel {

std::size_t PredicateParams::parameter_count() const {
    std::size_t n = static_cast<std::size_t>(u.size()) + static_cast<std::size_t>(b.size()) +
                    static_cast<std::size_t>(V.size());
    for (const auto& w : W) n += static_cast<std::size_t>(w.size());
    return n;
}

void PredicateParams::check_shapes() const {
    const int d = input_dim;
    const int kk = k();
    if (b.size() != kk || V.rows() != kk || V.cols() != d ||
        static_cast<int>(W.size()) != kk)
        throw std::invalid_argument("predicate parameter shapes are inconsistent");
    for (const auto& w : W)
        if (w.rows() != d || w.cols() != d)
            throw std::invalid_argument("tensor slice shape mismatch");
}

PredicateGrad PredicateGrad::zeros_like(const PredicateParams& p) {
    PredicateGrad g;
    g.u = Eigen::VectorXd::Zero(p.u.size());
    g.b = Eigen::VectorXd::Zero(p.b.size());
    g.V = Eigen::MatrixXd::Zero(p.V.rows(), p.V.cols());
    g.W.reserve(p.W.size());
    for (const auto& w : p.W) g.W.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    return g;
}

void PredicateGrad::add_scaled(const PredicateGrad& other, double scale) {
    u += scale * other.u;
    b += scale * other.b;
    V += scale * other.V;
    for (std::size_t i = 0; i < W.size(); ++i) W[i] += scale * other.W[i];
}

void PredicateGrad::setZero() {
    u.setZero();
    b.setZero();
    V.setZero();
    for (auto& w : W) w.setZero();
}

double Theta::squared_norm() const {
    double s = 0.0;
    for (const auto& [name, p] : predicates) {
        s += p.u.squaredNorm() + p.b.squaredNorm() + p.V.squaredNorm();
        for (const auto& w : p.W) s += w.squaredNorm();
    }
    return s;
}

std::size_t Theta::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, p] : predicates) n += p.parameter_count();
    return n;
}

GradientBundle GradientBundle::zeros_like(const Theta& theta) {
    GradientBundle g;
    for (const auto& [name, p] : theta.predicates)
        g.predicates.emplace(name, PredicateGrad::zeros_like(p));
    return g;
}

void GradientBundle::setZero() {
    for (auto& [name, g] : predicates) g.setZero();
}

Theta init_theta(const Signature& sig, int k, int input_dim, double lambda,
                 std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (input_dim < 1) throw std::invalid_argument("input_dim must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.1);
    Theta theta;
    theta.k = k;
    theta.lambda = lambda;
    const int d = input_dim;
    for (const std::string& pred : sig.binary_predicates()) {
        PredicateParams p;
        p.arity = 2;
        p.input_dim = input_dim;
        p.W.reserve(k);
        for (int i = 0; i < k; ++i) {
            Eigen::MatrixXd w(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) w(r, c) = normal(rng);
            p.W.push_back(std::move(w));
        }
        p.V.resize(k, d);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < d; ++c) p.V(r, c) = normal(rng);
        p.b.resize(k);
        for (int i = 0; i < k; ++i) p.b(i) = normal(rng);
        p.u.resize(k);
        for (int i = 0; i < k; ++i) p.u(i) = normal(rng);
        theta.predicates.emplace(pred, std::move(p));
    }
    return theta;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double ntn_forward(const PredicateParams& p, const Eigen::VectorXd& v) {
    if (v.size() != p.input_dim) throw std::invalid_argument("ntn_forward: wrong input size");
    const int k = p.k();
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        double z = v.dot(p.W[i] * v) + p.V.row(i).dot(v) + p.b(i);
        s += p.u(i) * std::tanh(z);
    }
    return sigmoid(s);
}

void ntn_backward_into(const PredicateParams& p, const Eigen::VectorXd& v, double upstream,
                       PredicateGrad& grad) {
    if (v.size() != p.input_dim) throw std::invalid_argument("ntn_backward: wrong input size");
    const int k = p.k();
    Eigen::VectorXd h(k);
    for (int i = 0; i < k; ++i) {
        double z = v.dot(p.W[i] * v) + p.V.row(i).dot(v) + p.b(i);
        h(i) = std::tanh(z);
    }
    const double y = sigmoid(p.u.dot(h));
    const double dy = upstream * y * (1.0 - y);
    grad.u += dy * h;
    for (int i = 0; i < k; ++i) {
        const double dz = dy * p.u(i) * (1.0 - h(i) * h(i));
        grad.b(i) += dz;
        grad.V.row(i) += dz * v.transpose();
        grad.W[i].noalias() += dz * v * v.transpose();
    }
}

PredicateGrad ntn_backward(const PredicateParams& p, const Eigen::VectorXd& v, double upstream) {
    PredicateGrad g = PredicateGrad::zeros_like(p);
    ntn_backward_into(p, v, upstream, g);
    return g;
}

std::size_t argmax_lowest(const Eigen::VectorXd& scores) {
    if (scores.size() == 0) throw std::invalid_argument("argmax of an empty score vector");
    std::size_t best = 0;
    for (int i = 1; i < scores.size(); ++i)
        if (scores(i) > scores(best)) best = static_cast<std::size_t>(i);
    return best;
}

double unary_grounding(const Eigen::VectorXd& scores, std::size_t class_index) {
    return argmax_lowest(scores) == class_index ? 1.0 : 0.0;
}

namespace {

constexpr char kMagic[8] = {'V', 'R', 'E', 'L', 'M', 'D', 'L', '1'};

void write_u32(std::ostream& os, std::uint32_t x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_doubles(std::ostream& os, const double* data, std::size_t count) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t x = 0;
    is.read(reinterpret_cast<char*>(&x), sizeof(x));
    return x;
}

std::string read_string(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    return s;
}

void read_doubles(std::istream& is, double* data, std::size_t count) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

}  // namespace

void save_model(const std::string& path, const Signature& sig, const Theta& theta,
                int input_dim) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open model file for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_u32(os, static_cast<std::uint32_t>(sig.unary_predicates().size()));
    for (const auto& name : sig.unary_predicates()) write_string(os, name);
    write_u32(os, static_cast<std::uint32_t>(sig.binary_predicates().size()));
    for (const auto& name : sig.binary_predicates()) write_string(os, name);
    write_u32(os, static_cast<std::uint32_t>(theta.k));
    write_u32(os, static_cast<std::uint32_t>(input_dim));
    write_doubles(os, &theta.lambda, 1);
    for (const auto& name : sig.binary_predicates()) {
        const PredicateParams& p = theta.predicates.at(name);
        const int d = p.input_dim;
        for (const auto& w : p.W) write_doubles(os, w.data(), static_cast<std::size_t>(d) * d);
        write_doubles(os, p.V.data(), static_cast<std::size_t>(p.V.size()));
        write_doubles(os, p.b.data(), static_cast<std::size_t>(p.b.size()));
        write_doubles(os, p.u.data(), static_cast<std::size_t>(p.u.size()));
    }
    if (!os) throw std::runtime_error("failed writing model file: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open model file: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a model file: " + path);
    std::vector<std::string> unary(read_u32(is));
    for (auto& name : unary) name = read_string(is);
    std::vector<std::string> binary(read_u32(is));
    for (auto& name : binary) name = read_string(is);
    LoadedModel m;
    m.signature = Signature(unary, binary);
    const int k = static_cast<int>(read_u32(is));
    m.input_dim = static_cast<int>(read_u32(is));
    m.theta.k = k;
    read_doubles(is, &m.theta.lambda, 1);
    const int d = m.input_dim;
    for (const auto& name : binary) {
        PredicateParams p;
        p.arity = 2;
        p.input_dim = m.input_dim;
        p.W.assign(k, Eigen::MatrixXd(d, d));
        for (auto& w : p.W) read_doubles(is, w.data(), static_cast<std::size_t>(d) * d);
        p.V.resize(k, d);
        read_doubles(is, p.V.data(), static_cast<std::size_t>(p.V.size()));
        p.b.resize(k);
        read_doubles(is, p.b.data(), static_cast<std::size_t>(p.b.size()));
        p.u.resize(k);
        read_doubles(is, p.u.data(), static_cast<std::size_t>(p.u.size()));
        m.theta.predicates.emplace(name, std::move(p));
    }
    if (!is) throw std::runtime_error("truncated model file: " + path);
    return m;
}

}  // namespace vrel
