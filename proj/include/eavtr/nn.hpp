#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "eavtr/common.hpp"

namespace eavtr::nn {

using Matrix = Eigen::MatrixXd;

struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;
    bool decay = true;

    size_t size() const { return static_cast<size_t>(value.size()); }
};

// Named parameter set with AdamW state.  Creation order is the serialization
// order, so checkpoints are byte-stable across runs.
class ParamStore {
  public:
    Param& create(const std::string& name, Eigen::Index rows, Eigen::Index cols, double init_std,
                  Rng& rng);
    Param& create_constant(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                           double fill);
    Param& get(const std::string& name);
    const Param& get(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    void zero_grad();
    size_t parameter_count() const;
    std::uint64_t value_hash() const;

    // Decoupled weight decay; decay applies only to 2-d weight matrices.
    void adamw_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8,
                    double weight_decay = 0.01);
    std::int64_t step_count() const { return step_; }

    void save(std::ostream& out, bool with_optimizer_state) const;
    // Populates existing params; throws on unknown names or shape conflicts.
    void load(std::istream& in, bool with_optimizer_state);

    const std::vector<std::unique_ptr<Param>>& params() const { return params_; }

  private:
    std::vector<std::unique_ptr<Param>> params_;
    std::map<std::string, size_t> index_;
    std::int64_t step_ = 0;
};

struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// Reverse-mode tape.  Build a Var graph forward, seed output gradients with
// add_grad, then call backward(); parameter gradients accumulate into the
// ParamStore entries referenced by param().
class Tape {
  public:
    Var constant(Matrix value);
    Var param(Param& p);

    Var matmul(Var a, Var b);     // A * B
    Var matmul_nt(Var a, Var b);  // A * B^T
    Var add(Var a, Var b);
    Var add_rowvec(Var a, Var bias);  // bias is 1 x cols, broadcast over rows
    Var scale(Var a, double c);
    Var gelu(Var a);
    Var softmax_rows(Var a);
    Var layernorm_rows(Var a, Var gamma, Var beta, double eps = 1e-5);
    Var slice_cols(Var a, Eigen::Index start, Eigen::Index len);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    Var gather_rows(Var a, std::vector<int> rows);
    Var l2_normalize_rows(Var a);

    const Matrix& val(Var v) const;
    const Matrix& grad(Var v) const;
    void add_grad(Var v, const Matrix& g);
    void backward();
    size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Matrix value;
        Matrix grad;
        std::function<void(Tape&)> back;
    };

    Var push(Matrix value, std::function<void(Tape&)> back);
    Matrix& grad_buf(int id);

    std::vector<Node> nodes_;
};

// Central-difference gradient checker for scalar functions of a matrix.
double max_relative_grad_error(const std::function<double(const Matrix&)>& f, const Matrix& at,
                               const Matrix& analytic_grad, double step = 1e-5);

}  // namespace eavtr::nn
