#include "netwalk/autodiff.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace netwalk::ad {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMat>;
using ECMap = Eigen::Map<const EMat>;

ECMap emap(const Tensor& t) { return ECMap(t.data(), t.rows(), t.cols()); }
EMap emap(Tensor& t) { return EMap(t.data(), t.rows(), t.cols()); }

void check_finite(const Tensor& t, const char* op) {
    if (!t.all_finite())
        throw std::runtime_error(std::string("non-finite values produced by ") + op);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

Tape* common_tape(const Tensor& a, const Tensor& b) {
    if (a.tracked() && b.tracked() && a.tape() != b.tape())
        throw std::invalid_argument("operands tracked on different tapes");
    return a.tracked() ? a.tape() : (b.tracked() ? b.tape() : nullptr);
}

}  // namespace

Tensor::Tensor(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(std::make_shared<detail::Buffer>(static_cast<std::size_t>(rows) * cols, 0.0)) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("tensor dimensions must be positive");
}

Tensor::Tensor(int rows, int cols, const std::vector<double>& values) : Tensor(rows, cols) {
    if (values.size() != static_cast<std::size_t>(size()))
        throw std::invalid_argument("tensor data length must equal rows*cols");
    data_->assign(values.begin(), values.end());
}

Tensor Tensor::scalar(double v) {
    Tensor t(1, 1);
    (*t.data_)[0] = v;
    return t;
}

Tensor Tensor::full(int rows, int cols, double v) {
    Tensor t(rows, cols);
    std::fill(t.data_->begin(), t.data_->end(), v);
    return t;
}

double Tensor::value() const {
    if (size() != 1) throw std::invalid_argument("value(): tensor is not scalar");
    return (*data_)[0];
}

Tensor Tensor::detached() const {
    Tensor t = *this;
    t.tape_ = nullptr;
    t.node_ = -1;
    return t;
}

Tensor Tensor::clone() const {
    Tensor t(rows_, cols_);
    *t.data_ = *data_;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : *data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor Tape::watch(const Tensor& t) {
    Tensor tracked = t;
    tracked.tape_ = this;
    tracked.node_ = static_cast<int>(nodes_.size());
    nodes_.push_back(NodeRec{{}, {}, tracked, nullptr});
    return tracked;
}

Tensor Tape::attach(Tensor result, std::vector<Tensor> inputs, BackwardFn backward) {
    result.tape_ = this;
    result.node_ = static_cast<int>(nodes_.size());
    std::vector<int> ids(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k)
        ids[k] = (inputs[k].tracked() && inputs[k].tape() == this) ? inputs[k].node() : -1;
    nodes_.push_back(NodeRec{std::move(ids), std::move(inputs), result, std::move(backward)});
    return result;
}

namespace {

// Appends a node when any input is tracked; otherwise returns the plain value.
Tensor record(Tape* tape, Tensor result, std::vector<Tensor> inputs, Tape::BackwardFn backward) {
    if (tape == nullptr) return result;
    return tape->attach(std::move(result), std::move(inputs), std::move(backward));
}

}  // namespace

// --- elementwise -----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a) + emap(b);
    check_finite(out, "add");
    return record(common_tape(a, b), out, {a, b},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{g, g};
                  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a) - emap(b);
    check_finite(out, "sub");
    return record(common_tape(a, b), out, {a, b},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{g, scale(g, -1.0)};
                  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).cwiseProduct(emap(b));
    check_finite(out, "mul");
    return record(common_tape(a, b), out, {a, b},
                  [](const Tensor& g, const std::vector<Tensor>& in, const Tensor&) {
                      return std::vector<Tensor>{mul(g, in[1]), mul(g, in[0])};
                  });
}

Tensor divide(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "divide");
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).cwiseQuotient(emap(b));
    check_finite(out, "divide");
    return record(common_tape(a, b), out, {a, b},
                  [](const Tensor& g, const std::vector<Tensor>& in, const Tensor& y) {
                      // d(a/b)/da = 1/b, d(a/b)/db = -y/b
                      return std::vector<Tensor>{divide(g, in[1]),
                                                 scale(divide(mul(g, y), in[1]), -1.0)};
                  });
}

Tensor add_scalar(const Tensor& a, double c) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array() + c;
    check_finite(out, "add_scalar");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{g};
                  });
}

Tensor scale(const Tensor& a, double c) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a) * c;
    check_finite(out, "scale");
    return record(a.tape(), out, {a},
                  [c](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{scale(g, c)};
                  });
}

// --- linear algebra ---------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    Tensor out(a.rows(), b.cols());
    emap(out).noalias() = emap(a) * emap(b);
    check_finite(out, "matmul");
    return record(common_tape(a, b), out, {a, b},
                  [](const Tensor& g, const std::vector<Tensor>& in, const Tensor&) {
                      return std::vector<Tensor>{matmul(g, transpose(in[1])),
                                                 matmul(transpose(in[0]), g)};
                  });
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols(), a.rows());
    emap(out) = emap(a).transpose();
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{transpose(g)};
                  });
}

// --- nonlinearities ----------------------------------------------------------

Tensor tanh(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array().tanh();
    check_finite(out, "tanh");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor& y) {
                      // 1 - y^2
                      return std::vector<Tensor>{mul(g, add_scalar(scale(square(y), -1.0), 1.0))};
                  });
}

Tensor sigmoid(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = 1.0 / (1.0 + (-emap(a).array()).exp());
    check_finite(out, "sigmoid");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor& y) {
                      // y (1 - y)
                      return std::vector<Tensor>{mul(g, mul(y, add_scalar(scale(y, -1.0), 1.0)))};
                  });
}

Tensor exp(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array().exp();
    check_finite(out, "exp");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor& y) {
                      return std::vector<Tensor>{mul(g, y)};
                  });
}

Tensor log(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array().log();
    check_finite(out, "log");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>& in, const Tensor&) {
                      return std::vector<Tensor>{divide(g, in[0])};
                  });
}

Tensor square(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array().square();
    check_finite(out, "square");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>& in, const Tensor&) {
                      return std::vector<Tensor>{mul(g, scale(in[0], 2.0))};
                  });
}

Tensor sqrt(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    emap(out) = emap(a).array().sqrt();
    check_finite(out, "sqrt");
    return record(a.tape(), out, {a},
                  [](const Tensor& g, const std::vector<Tensor>&, const Tensor& y) {
                      return std::vector<Tensor>{divide(g, scale(y, 2.0))};
                  });
}

// --- reductions and shape ops -------------------------------------------------

Tensor sum(const Tensor& a) {
    Tensor out = Tensor::scalar(emap(a).sum());
    check_finite(out, "sum");
    return record(a.tape(), out, {a},
                  [r = a.rows(), c = a.cols()](const Tensor& g, const std::vector<Tensor>&,
                                               const Tensor&) {
                      return std::vector<Tensor>{broadcast(g, r, c)};
                  });
}

Tensor sum_rows(const Tensor& a) {
    Tensor out(a.rows(), 1);
    emap(out).col(0) = emap(a).rowwise().sum();
    check_finite(out, "sum_rows");
    return record(a.tape(), out, {a},
                  [c = a.cols()](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{broadcast(g, g.rows(), c)};
                  });
}

Tensor sum_cols(const Tensor& a) {
    Tensor out(1, a.cols());
    emap(out).row(0) = emap(a).colwise().sum();
    check_finite(out, "sum_cols");
    return record(a.tape(), out, {a},
                  [r = a.rows()](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{broadcast(g, r, g.cols())};
                  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.size())); }

Tensor broadcast(const Tensor& a, int rows, int cols) {
    const bool from_scalar = a.rows() == 1 && a.cols() == 1;
    const bool from_row = a.rows() == 1 && a.cols() == cols;
    const bool from_col = a.cols() == 1 && a.rows() == rows;
    if (!(from_scalar || from_row || from_col))
        throw std::invalid_argument("broadcast: unsupported source shape");
    Tensor out(rows, cols);
    if (from_scalar)
        emap(out).setConstant(a.value());
    else if (from_row)
        emap(out) = emap(a).row(0).replicate(rows, 1);
    else
        emap(out) = emap(a).col(0).replicate(1, cols);
    return record(a.tape(), out, {a},
                  [from_scalar, from_row](const Tensor& g, const std::vector<Tensor>&,
                                          const Tensor&) {
                      if (from_scalar) return std::vector<Tensor>{sum(g)};
                      if (from_row) return std::vector<Tensor>{sum_cols(g)};
                      return std::vector<Tensor>{sum_rows(g)};
                  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("concat_cols: row counts differ");
    Tensor out(a.rows(), a.cols() + b.cols());
    emap(out).leftCols(a.cols()) = emap(a);
    emap(out).rightCols(b.cols()) = emap(b);
    return record(common_tape(a, b), out, {a, b},
                  [ac = a.cols()](const Tensor& g, const std::vector<Tensor>&, const Tensor&) {
                      return std::vector<Tensor>{slice_cols(g, 0, ac),
                                                 slice_cols(g, ac, g.cols())};
                  });
}

Tensor slice_cols(const Tensor& a, int c0, int c1) {
    if (c0 < 0 || c1 <= c0 || c1 > a.cols()) throw std::invalid_argument("slice_cols: bad range");
    Tensor out(a.rows(), c1 - c0);
    emap(out) = emap(a).middleCols(c0, c1 - c0);
    return record(a.tape(), out, {a},
                  [c0, c1, total = a.cols()](const Tensor& g, const std::vector<Tensor>&,
                                             const Tensor&) {
                      Tensor padded = g;
                      if (c0 > 0) padded = concat_cols(Tensor::zeros(g.rows(), c0), padded);
                      if (c1 < total) padded = concat_cols(padded, Tensor::zeros(g.rows(), total - c1));
                      return std::vector<Tensor>{padded};
                  });
}

Tensor softmax_rows(const Tensor& a) {
    // subtracting the (constant) row max keeps exp in range without touching
    // the gradient
    Tensor shift(a.rows(), 1);
    for (int i = 0; i < a.rows(); ++i) {
        double m = a(i, 0);
        for (int j = 1; j < a.cols(); ++j) m = std::max(m, a(i, j));
        shift.at(i, 0) = m;
    }
    Tensor e = exp(sub(a, broadcast(shift, a.rows(), a.cols())));
    Tensor z = sum_rows(e);
    return divide(e, broadcast(z, a.rows(), a.cols()));
}

std::vector<int> argmax_rows(const Tensor& a) {
    std::vector<int> idx(static_cast<std::size_t>(a.rows()), 0);
    for (int i = 0; i < a.rows(); ++i) {
        double best = a(i, 0);
        for (int j = 1; j < a.cols(); ++j)
            if (a(i, j) > best) {
                best = a(i, j);
                idx[static_cast<std::size_t>(i)] = j;
            }
    }
    return idx;
}

Tensor onehot_argmax(const Tensor& a) {
    Tensor out(a.rows(), a.cols());
    auto idx = argmax_rows(a);
    for (int i = 0; i < a.rows(); ++i) out.at(i, idx[static_cast<std::size_t>(i)]) = 1.0;
    return out;
}

// --- differentiation ---------------------------------------------------------

std::vector<Tensor> grad(Tape& tape, const Tensor& output, const std::vector<Tensor>& wrt) {
    if (!output.tracked() || output.tape() != &tape)
        throw std::invalid_argument("grad: output is not on this tape");
    if (output.size() != 1) throw std::invalid_argument("grad: output must be scalar");
    for (const Tensor& w : wrt)
        if (!w.tracked() || w.tape() != &tape)
            throw std::invalid_argument("grad: wrt tensor not on tape");

    std::unordered_map<int, Tensor> adjoint;
    adjoint.emplace(output.node(), tape.watch(Tensor::full(1, 1, 1.0)));

    // Reverse sweep. Backward rules append new nodes (ids above the sweep
    // range), which is what makes the result differentiable again.
    for (int id = output.node(); id >= 0; --id) {
        auto it = adjoint.find(id);
        if (it == adjoint.end()) continue;
        const Tape::NodeRec& node = tape.nodes_[static_cast<std::size_t>(id)];
        if (!node.backward) continue;
        Tensor g = it->second;
        std::vector<Tensor> input_grads = node.backward(g, node.inputs, node.output);
        for (std::size_t k = 0; k < input_grads.size(); ++k) {
            int in_id = node.input_ids[k];
            if (in_id < 0) continue;
            auto found = adjoint.find(in_id);
            if (found == adjoint.end())
                adjoint.emplace(in_id, input_grads[k]);
            else
                found->second = add(found->second, input_grads[k]);
        }
    }

    std::vector<Tensor> result;
    result.reserve(wrt.size());
    for (const Tensor& w : wrt) {
        auto it = adjoint.find(w.node());
        if (it != adjoint.end())
            result.push_back(it->second);
        else
            result.push_back(tape.watch(Tensor::zeros(w.rows(), w.cols())));
    }
    return result;
}

Tensor gradient_penalty(Tape& tape, const Tensor& d_output, const Tensor& d_input) {
    Tensor g = grad(tape, d_output, {d_input})[0];
    Tensor norm = sqrt(add_scalar(sum(square(g)), 1e-12));
    return square(add_scalar(norm, -1.0));
}

}  // namespace netwalk::ad
