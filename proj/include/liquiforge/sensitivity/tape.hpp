#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace liquiforge {

class Tape;

// Value recorded on a tape; arithmetic on Vars appends nodes.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;
    double value = 0.0;
};

/// Reverse-mode tape with at most two parents per node.
class Tape {
public:
    struct Node {
        std::size_t parent[2];
        double partial[2];
        std::uint8_t arity;
    };

    Var variable(double v) { return push(v, 0, 0, 0.0, 0, 0.0); }
    Var constant(double v) { return variable(v); }

    Var push(double v, std::uint8_t arity, std::size_t p0, double d0, std::size_t p1, double d1) {
        nodes_.push_back({{p0, p1}, {d0, d1}, arity});
        return {this, nodes_.size() - 1, v};
    }

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    // Adjoints of every node with respect to `output`.
    const std::vector<double>& backpropagate(const Var& output) {
        adjoint_.assign(nodes_.size(), 0.0);
        adjoint_[output.id] = 1.0;
        for (std::size_t k = output.id + 1; k-- > 0;) {
            const double a = adjoint_[k];
            if (a == 0.0) continue;
            const Node& n = nodes_[k];
            for (std::uint8_t r = 0; r < n.arity; ++r) adjoint_[n.parent[r]] += a * n.partial[r];
        }
        return adjoint_;
    }

    double adjoint(const Var& v) const { return adjoint_[v.id]; }

private:
    std::vector<Node> nodes_;
    std::vector<double> adjoint_;
};

inline Var operator+(const Var& a, const Var& b) { return a.tape->push(a.value + b.value, 2, a.id, 1.0, b.id, 1.0); }
inline Var operator-(const Var& a, const Var& b) { return a.tape->push(a.value - b.value, 2, a.id, 1.0, b.id, -1.0); }
inline Var operator*(const Var& a, const Var& b) {
    return a.tape->push(a.value * b.value, 2, a.id, b.value, b.id, a.value);
}
inline Var operator/(const Var& a, const Var& b) {
    const double q = a.value / b.value;
    return a.tape->push(q, 2, a.id, 1.0 / b.value, b.id, -q / b.value);
}
inline Var operator+(const Var& a, double c) { return a.tape->push(a.value + c, 1, a.id, 1.0, 0, 0.0); }
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) { return a.tape->push(a.value - c, 1, a.id, 1.0, 0, 0.0); }
inline Var operator-(double c, const Var& a) { return a.tape->push(c - a.value, 1, a.id, -1.0, 0, 0.0); }
inline Var operator-(const Var& a) { return a.tape->push(-a.value, 1, a.id, -1.0, 0, 0.0); }
inline Var operator*(const Var& a, double c) { return a.tape->push(a.value * c, 1, a.id, c, 0, 0.0); }
inline Var operator*(double c, const Var& a) { return a * c; }
inline Var operator/(const Var& a, double c) { return a.tape->push(a.value / c, 1, a.id, 1.0 / c, 0, 0.0); }
inline Var operator/(double c, const Var& a) {
    const double q = c / a.value;
    return a.tape->push(q, 1, a.id, -q / a.value, 0, 0.0);
}
inline Var exp(const Var& a) {
    const double e = std::exp(a.value);
    return a.tape->push(e, 1, a.id, e, 0, 0.0);
}
inline Var log(const Var& a) { return a.tape->push(std::log(a.value), 1, a.id, 1.0 / a.value, 0, 0.0); }

} // namespace liquiforge
