#include "eavtr/nn.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace eavtr::nn {

// ---------------------------------------------------------------------------
// ParamStore
// ---------------------------------------------------------------------------

Param& ParamStore::create(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                          double init_std, Rng& rng) {
    if (index_.count(name)) throw DomainError("duplicate parameter name: " + name);
    auto p = std::make_unique<Param>();
    p->name = name;
    p->value.resize(rows, cols);
    std::normal_distribution<double> dist(0.0, init_std);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) p->value(i, j) = dist(rng);
    p->grad = Matrix::Zero(rows, cols);
    p->adam_m = Matrix::Zero(rows, cols);
    p->adam_v = Matrix::Zero(rows, cols);
    p->decay = rows > 1 && cols > 1;
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return *params_.back();
}

Param& ParamStore::create_constant(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                                   double fill) {
    if (index_.count(name)) throw DomainError("duplicate parameter name: " + name);
    auto p = std::make_unique<Param>();
    p->name = name;
    p->value = Matrix::Constant(rows, cols, fill);
    p->grad = Matrix::Zero(rows, cols);
    p->adam_m = Matrix::Zero(rows, cols);
    p->adam_v = Matrix::Zero(rows, cols);
    p->decay = false;
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return *params_.back();
}

Param& ParamStore::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw DomainError("unknown parameter: " + name);
    return *params_[it->second];
}

const Param& ParamStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DomainError("unknown parameter: " + name);
    return *params_[it->second];
}

void ParamStore::zero_grad() {
    for (auto& p : params_) p->grad.setZero();
}

size_t ParamStore::parameter_count() const {
    size_t n = 0;
    for (const auto& p : params_) n += p->size();
    return n;
}

std::uint64_t ParamStore::value_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& p : params_) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(p->value.data());
        for (size_t i = 0; i < p->size() * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    }
    return h;
}

void ParamStore::adamw_step(double lr, double beta1, double beta2, double eps,
                            double weight_decay) {
    ++step_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
    for (auto& p : params_) {
        p->adam_m = beta1 * p->adam_m + (1.0 - beta1) * p->grad;
        p->adam_v = beta2 * p->adam_v.array().matrix() +
                    (1.0 - beta2) * p->grad.array().square().matrix();
        Matrix m_hat = p->adam_m / bc1;
        Matrix v_hat = p->adam_v / bc2;
        if (p->decay && weight_decay > 0) p->value -= lr * weight_decay * p->value;
        p->value.array() -= lr * m_hat.array() / (v_hat.array().sqrt() + eps);
    }
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IntegrityError("truncated parameter stream");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw IntegrityError("truncated parameter stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_matrix(std::ostream& out, const Matrix& m) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
}

Matrix get_matrix(std::istream& in) {
    const auto rows = static_cast<Eigen::Index>(get_u32(in));
    const auto cols = static_cast<Eigen::Index>(get_u32(in));
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
    if (!in) throw IntegrityError("truncated parameter payload");
    return m;
}

}  // namespace

void ParamStore::save(std::ostream& out, bool with_optimizer_state) const {
    std::ostringstream body;
    put_u32(body, static_cast<std::uint32_t>(params_.size()));
    put_u32(body, with_optimizer_state ? 1u : 0u);
    put_u64(body, static_cast<std::uint64_t>(step_));
    for (const auto& p : params_) {
        put_u32(body, static_cast<std::uint32_t>(p->name.size()));
        body.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        body.write("f8", 2);
        put_matrix(body, p->value);
        if (with_optimizer_state) {
            put_matrix(body, p->adam_m);
            put_matrix(body, p->adam_v);
        }
    }
    std::string blob = body.str();
    std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    put_u64(out, blob.size());
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    put_u32(out, crc);
}

void ParamStore::load(std::istream& in, bool with_optimizer_state) {
    std::uint64_t len = get_u64(in);
    std::string blob(len, '\0');
    in.read(blob.data(), static_cast<std::streamsize>(len));
    if (!in) throw IntegrityError("truncated parameter blob");
    std::uint32_t stored = get_u32(in);
    std::uint32_t actual = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    if (stored != actual) throw IntegrityError("parameter blob checksum failure");

    std::istringstream body(blob);
    std::uint32_t count = get_u32(body);
    std::uint32_t has_opt = get_u32(body);
    std::int64_t step = static_cast<std::int64_t>(get_u64(body));
    if (with_optimizer_state && !has_opt)
        throw IntegrityError("checkpoint has no optimizer state");
    if (count != params_.size())
        throw IntegrityError("parameter count mismatch vs config");
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t name_len = get_u32(body);
        std::string name(name_len, '\0');
        body.read(name.data(), name_len);
        char dtype[2];
        body.read(dtype, 2);
        if (!body || std::memcmp(dtype, "f8", 2) != 0)
            throw IntegrityError("unsupported parameter dtype");
        Param& p = get(name);
        Matrix value = get_matrix(body);
        if (value.rows() != p.value.rows() || value.cols() != p.value.cols()) {
            throw IntegrityError("shape mismatch for parameter " + name);
        }
        p.value = value;
        if (has_opt) {
            Matrix m = get_matrix(body);
            Matrix v = get_matrix(body);
            if (with_optimizer_state) {
                p.adam_m = m;
                p.adam_v = v;
            }
        }
    }
    if (with_optimizer_state) step_ = step;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

Var Tape::push(Matrix value, std::function<void(Tape&)> back) {
    nodes_.push_back(Node{std::move(value), Matrix(), std::move(back)});
    return Var{static_cast<int>(nodes_.size() - 1)};
}

Matrix& Tape::grad_buf(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    return n.grad;
}

const Matrix& Tape::val(Var v) const { return nodes_.at(static_cast<size_t>(v.id)).value; }

const Matrix& Tape::grad(Var v) const {
    const Node& n = nodes_.at(static_cast<size_t>(v.id));
    static const Matrix empty;
    return n.grad.size() ? n.grad : empty;
}

void Tape::add_grad(Var v, const Matrix& g) { grad_buf(v.id) += g; }

void Tape::backward() {
    for (size_t i = nodes_.size(); i-- > 0;) {
        Node& n = nodes_[i];
        if (n.grad.size() && n.back) n.back(*this);
    }
}

Var Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

Var Tape::param(Param& p) {
    Var v = push(p.value, nullptr);
    const int id = v.id;
    Param* pp = &p;
    nodes_[static_cast<size_t>(id)].back = [id, pp](Tape& t) { pp->grad += t.nodes_[static_cast<size_t>(id)].grad; };
    return v;
}

Var Tape::matmul(Var a, Var b) {
    Var out = push(val(a) * val(b), nullptr);
    const int oid = out.id, aid = a.id, bid = b.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, bid](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        t.grad_buf(aid).noalias() += g * t.nodes_[static_cast<size_t>(bid)].value.transpose();
        t.grad_buf(bid).noalias() += t.nodes_[static_cast<size_t>(aid)].value.transpose() * g;
    };
    return out;
}

Var Tape::matmul_nt(Var a, Var b) {
    Var out = push(val(a) * val(b).transpose(), nullptr);
    const int oid = out.id, aid = a.id, bid = b.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, bid](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        t.grad_buf(aid).noalias() += g * t.nodes_[static_cast<size_t>(bid)].value;
        t.grad_buf(bid).noalias() += g.transpose() * t.nodes_[static_cast<size_t>(aid)].value;
    };
    return out;
}

Var Tape::add(Var a, Var b) {
    Var out = push(val(a) + val(b), nullptr);
    const int oid = out.id, aid = a.id, bid = b.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, bid](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        t.grad_buf(aid) += g;
        t.grad_buf(bid) += g;
    };
    return out;
}

Var Tape::add_rowvec(Var a, Var bias) {
    Matrix out_val = val(a);
    out_val.rowwise() += val(bias).row(0);
    Var out = push(std::move(out_val), nullptr);
    const int oid = out.id, aid = a.id, bid = bias.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, bid](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        t.grad_buf(aid) += g;
        t.grad_buf(bid) += g.colwise().sum();
    };
    return out;
}

Var Tape::scale(Var a, double c) {
    Var out = push(val(a) * c, nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, c](Tape& t) {
        t.grad_buf(aid) += t.nodes_[static_cast<size_t>(oid)].grad * c;
    };
    return out;
}

Var Tape::gelu(Var a) {
    constexpr double k = 0.7978845608028654;  // sqrt(2/pi)
    constexpr double c3 = 0.044715;
    const Matrix& x = val(a);
    Matrix u = (k * (x.array() + c3 * x.array().cube())).matrix();
    Matrix h = u.array().tanh().matrix();
    Matrix y = (0.5 * x.array() * (1.0 + h.array())).matrix();
    Var out = push(std::move(y), nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, h, k, c3](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        const Matrix& x2 = t.nodes_[static_cast<size_t>(aid)].value;
        Eigen::ArrayXXd sech2 = 1.0 - h.array().square();
        Eigen::ArrayXXd du = k * (1.0 + 3.0 * c3 * x2.array().square());
        Eigen::ArrayXXd dy = 0.5 * (1.0 + h.array()) + 0.5 * x2.array() * sech2 * du;
        t.grad_buf(aid).array() += g.array() * dy;
    };
    return out;
}

Var Tape::softmax_rows(Var a) {
    const Matrix& x = val(a);
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double m = x.row(r).maxCoeff();
        Eigen::RowVectorXd e = (x.row(r).array() - m).exp();
        y.row(r) = e / e.sum();
    }
    Var out = push(std::move(y), nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        const Matrix& yv = t.nodes_[static_cast<size_t>(oid)].value;
        Matrix& da = t.grad_buf(aid);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            double dot = g.row(r).dot(yv.row(r));
            da.row(r).array() += (g.row(r).array() - dot) * yv.row(r).array();
        }
    };
    return out;
}

Var Tape::layernorm_rows(Var a, Var gamma, Var beta, double eps) {
    const Matrix& x = val(a);
    const Eigen::Index n = x.cols();
    Eigen::VectorXd mu = x.rowwise().mean();
    Matrix centered = x.colwise() - mu;
    Eigen::VectorXd var = centered.array().square().rowwise().mean();
    Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();
    Matrix xhat = centered.array().colwise() * inv_std.array();
    Matrix y = (xhat.array().rowwise() * val(gamma).row(0).array()).matrix();
    y.rowwise() += val(beta).row(0);
    Var out = push(std::move(y), nullptr);
    const int oid = out.id, aid = a.id, gid = gamma.id, bid = beta.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, gid, bid, xhat, inv_std, n](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        const Eigen::RowVectorXd gam = t.nodes_[static_cast<size_t>(gid)].value.row(0);
        t.grad_buf(gid) += (g.array() * xhat.array()).colwise().sum().matrix();
        t.grad_buf(bid) += g.colwise().sum();
        Matrix dxhat = (g.array().rowwise() * gam.array()).matrix();
        Matrix& da = t.grad_buf(aid);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            double sum_d = dxhat.row(r).sum();
            double sum_dx = dxhat.row(r).dot(xhat.row(r));
            da.row(r).array() += inv_std[r] * (dxhat.row(r).array() - inv_n * sum_d -
                                               xhat.row(r).array() * inv_n * sum_dx);
        }
    };
    return out;
}

Var Tape::slice_cols(Var a, Eigen::Index start, Eigen::Index len) {
    Var out = push(val(a).middleCols(start, len), nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, start, len](Tape& t) {
        t.grad_buf(aid).middleCols(start, len) += t.nodes_[static_cast<size_t>(oid)].grad;
    };
    return out;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw DomainError("concat_cols of nothing");
    Eigen::Index rows = val(parts[0]).rows();
    Eigen::Index cols = 0;
    for (Var p : parts) cols += val(p).cols();
    Matrix out_val(rows, cols);
    Eigen::Index off = 0;
    std::vector<std::pair<int, Eigen::Index>> spans;
    for (Var p : parts) {
        Eigen::Index w = val(p).cols();
        out_val.middleCols(off, w) = val(p);
        spans.emplace_back(p.id, off);
        off += w;
    }
    Var out = push(std::move(out_val), nullptr);
    const int oid = out.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, spans](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        for (auto [pid, start] : spans) {
            Eigen::Index w = t.nodes_[static_cast<size_t>(pid)].value.cols();
            t.grad_buf(pid) += g.middleCols(start, w);
        }
    };
    return out;
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw DomainError("concat_rows of nothing");
    Eigen::Index cols = val(parts[0]).cols();
    Eigen::Index rows = 0;
    for (Var p : parts) rows += val(p).rows();
    Matrix out_val(rows, cols);
    Eigen::Index off = 0;
    std::vector<std::pair<int, Eigen::Index>> spans;
    for (Var p : parts) {
        Eigen::Index h = val(p).rows();
        out_val.middleRows(off, h) = val(p);
        spans.emplace_back(p.id, off);
        off += h;
    }
    Var out = push(std::move(out_val), nullptr);
    const int oid = out.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, spans](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        for (auto [pid, start] : spans) {
            Eigen::Index h = t.nodes_[static_cast<size_t>(pid)].value.rows();
            t.grad_buf(pid) += g.middleRows(start, h);
        }
    };
    return out;
}

Var Tape::gather_rows(Var a, std::vector<int> rows) {
    Matrix out_val(static_cast<Eigen::Index>(rows.size()), val(a).cols());
    for (size_t i = 0; i < rows.size(); ++i) out_val.row(static_cast<Eigen::Index>(i)) = val(a).row(rows[i]);
    Var out = push(std::move(out_val), nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, rows](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        Matrix& da = t.grad_buf(aid);
        for (size_t i = 0; i < rows.size(); ++i) da.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
    };
    return out;
}

Var Tape::l2_normalize_rows(Var a) {
    const Matrix& x = val(a);
    Eigen::VectorXd norms = x.rowwise().norm();
    Matrix y = x.array().colwise() / norms.array().max(1e-12);
    Var out = push(std::move(y), nullptr);
    const int oid = out.id, aid = a.id;
    nodes_[static_cast<size_t>(oid)].back = [oid, aid, norms](Tape& t) {
        const Matrix& g = t.nodes_[static_cast<size_t>(oid)].grad;
        const Matrix& yv = t.nodes_[static_cast<size_t>(oid)].value;
        Matrix& da = t.grad_buf(aid);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            double dot = g.row(r).dot(yv.row(r));
            da.row(r) += (g.row(r) - dot * yv.row(r)) / std::max(norms[r], 1e-12);
        }
    };
    return out;
}

double max_relative_grad_error(const std::function<double(const Matrix&)>& f, const Matrix& at,
                               const Matrix& analytic_grad, double step) {
    double max_err = 0.0;
    Matrix x = at;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double orig = x(i, j);
            x(i, j) = orig + step;
            double plus = f(x);
            x(i, j) = orig - step;
            double minus = f(x);
            x(i, j) = orig;
            double numeric = (plus - minus) / (2.0 * step);
            double denom = std::max({std::abs(numeric), std::abs(analytic_grad(i, j)), 1e-8});
            max_err = std::max(max_err, std::abs(numeric - analytic_grad(i, j)) / denom);
        }
    }
    return max_err;
}

}  // namespace eavtr::nn
