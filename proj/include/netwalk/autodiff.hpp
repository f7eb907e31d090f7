#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <vector>

namespace netwalk::ad {

class Tape;

namespace detail {

// 64-byte alignment keeps SIMD kernel dispatch independent of where the
// allocator happens to place a buffer, which is required for bitwise
// reproducible results.
template <class T, std::size_t Align>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U, Align>&) {}
    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(Align)));
    }
    void deallocate(T* p, std::size_t n) {
        ::operator delete(p, n * sizeof(T), std::align_val_t(Align));
    }
    template <class U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };
    bool operator==(const AlignedAllocator&) const { return true; }
    bool operator!=(const AlignedAllocator&) const { return false; }
};

using Buffer = std::vector<double, AlignedAllocator<double, 64>>;

}  // namespace detail

// Dense 2-D tensor of doubles. Scalars are 1x1. A tensor is either a plain
// value or tracked on a tape (tape_ set, node_ >= 0). Data is shared between
// copies; tracked tensors must not outlive their tape.
class Tensor {
public:
    Tensor() = default;
    Tensor(int rows, int cols);
    Tensor(int rows, int cols, const std::vector<double>& values);

    static Tensor scalar(double v);
    static Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }
    static Tensor full(int rows, int cols, double v);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t size() const { return static_cast<std::int64_t>(rows_) * cols_; }

    double* data() { return data_->data(); }
    const double* data() const { return data_->data(); }
    double operator()(int i, int j) const { return (*data_)[static_cast<std::size_t>(i) * cols_ + j]; }
    double& at(int i, int j) { return (*data_)[static_cast<std::size_t>(i) * cols_ + j]; }

    // Scalar accessor; throws unless the tensor is 1x1.
    double value() const;

    bool tracked() const { return tape_ != nullptr; }
    Tape* tape() const { return tape_; }
    int node() const { return node_; }

    // Same data, no tape attachment.
    Tensor detached() const;

    // Independent copy of the data, untracked.
    Tensor clone() const;

    bool all_finite() const;

private:
    friend class Tape;
    int rows_ = 0, cols_ = 0;
    std::shared_ptr<detail::Buffer> data_;
    Tape* tape_ = nullptr;
    int node_ = -1;
};

// Record of primitive applications in execution (topological) order. The
// backward rule of every primitive is built from the same primitives, so
// gradients produced by grad() can themselves be differentiated.
class Tape {
public:
    using BackwardFn = std::function<std::vector<Tensor>(
        const Tensor& grad_out, const std::vector<Tensor>& inputs, const Tensor& output)>;

    // Registers t as a leaf and returns the tracked handle.
    Tensor watch(const Tensor& t);

    // Appends an operation node; used by the primitive implementations.
    Tensor attach(Tensor result, std::vector<Tensor> inputs, BackwardFn backward);

    int size() const { return static_cast<int>(nodes_.size()); }
    void clear() { nodes_.clear(); }

private:
    friend std::vector<Tensor> grad(Tape&, const Tensor&, const std::vector<Tensor>&);

    struct NodeRec {
        std::vector<int> input_ids;
        std::vector<Tensor> inputs;
        Tensor output;
        BackwardFn backward;  // null for leaves
    };
    std::deque<NodeRec> nodes_;  // deque: stable references while appending
};

// --- primitives -----------------------------------------------------------
// Each checks shapes, computes eagerly, verifies the result is finite, and
// records itself when any input is tracked.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor divide(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor sum(const Tensor& a);       // -> 1x1
Tensor sum_rows(const Tensor& a);  // row sums -> [R,1]
Tensor sum_cols(const Tensor& a);  // column sums -> [1,C]
Tensor mean(const Tensor& a);      // -> 1x1
// [1,1] -> [R,C], [1,C] -> [R,C], or [R,1] -> [R,C].
Tensor broadcast(const Tensor& a, int rows, int cols);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor slice_cols(const Tensor& a, int c0, int c1);
// Numerically stable row-wise softmax, composed from primitives.
Tensor softmax_rows(const Tensor& a);

// --- non-differentiable helpers --------------------------------------------

// Per-row argmax, ties to the lowest index.
std::vector<int> argmax_rows(const Tensor& a);
// One-hot rows from per-row argmax; plain (untracked) tensor.
Tensor onehot_argmax(const Tensor& a);

// --- differentiation --------------------------------------------------------

// d(output)/d(w) for each w in wrt. output must be a tracked scalar; every
// wrt tensor must be tracked on the same tape. The results are tape-tracked,
// so grad may be applied again. Tensors with no path to output yield zeros.
std::vector<Tensor> grad(Tape& tape, const Tensor& output, const std::vector<Tensor>& wrt);

// (‖∇_{d_input} d_output‖₂ − 1)², tracked and twice differentiable. An
// epsilon of 1e-12 under the square root guards the zero-gradient case.
Tensor gradient_penalty(Tape& tape, const Tensor& d_output, const Tensor& d_input);

}  // namespace netwalk::ad
