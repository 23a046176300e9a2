#include "sairod/types.hpp"

#include <cassert>
#include <ostream>
#include <sstream>

namespace sairod {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::full ? "full" : "simplified";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "full") return ModelKind::full;
    if (s == "simplified") return ModelKind::simplified;
    throw std::invalid_argument("unknown model kind: " + s);
}

std::uint64_t StateVector::pack() const {
    assert(S >= 0 && A >= 0 && I >= 0 && R >= 0 && O >= 0 && D >= 0 && Q >= 0 && Ra >= 0);
    assert(S < 256 && A < 256 && I < 256 && R < 256 && O < 256 && D < 256 && Q < 256 && Ra < 256);
    return (static_cast<std::uint64_t>(S) << 56) | (static_cast<std::uint64_t>(A) << 48) |
           (static_cast<std::uint64_t>(I) << 40) | (static_cast<std::uint64_t>(R) << 32) |
           (static_cast<std::uint64_t>(O) << 24) | (static_cast<std::uint64_t>(D) << 16) |
           (static_cast<std::uint64_t>(Q) << 8) | static_cast<std::uint64_t>(Ra);
}

StateVector StateVector::unpack(std::uint64_t key) {
    StateVector v;
    v.S = static_cast<int>((key >> 56) & 0xff);
    v.A = static_cast<int>((key >> 48) & 0xff);
    v.I = static_cast<int>((key >> 40) & 0xff);
    v.R = static_cast<int>((key >> 32) & 0xff);
    v.O = static_cast<int>((key >> 24) & 0xff);
    v.D = static_cast<int>((key >> 16) & 0xff);
    v.Q = static_cast<int>((key >> 8) & 0xff);
    v.Ra = static_cast<int>(key & 0xff);
    return v;
}

std::ostream& operator<<(std::ostream& os, const StateVector& v) {
    return os << '(' << v.S << ',' << v.A << ',' << v.I << ',' << v.R << ',' << v.O << ','
              << v.D << ',' << v.Q << ',' << v.Ra << ')';
}

std::ostream& operator<<(std::ostream& os, const Action& a) {
    return os << "(M=" << a.meetings << ",t=" << a.tests << ')';
}

bool FlowVector::non_negative() const {
    return d1 >= 0 && d2 >= 0 && d3 >= 0 && d4 >= 0 && d5 >= 0 && d6 >= 0 && d7 >= 0 &&
           d8 >= 0 && d9 >= 0 && d10 >= 0 && d11 >= 0;
}

bool FlowVector::feasible_from(const StateVector& v) const {
    return non_negative() && d1 <= v.S && d2 + d3 + d9 <= v.A && d10 + d11 <= v.Q &&
           d4 + d5 + d6 <= v.I && d7 + d8 <= v.O;
}

StateDelta FlowVector::delta(ModelKind kind) const {
    StateDelta dv;
    dv.S = -d1;
    dv.A = d1 - d2 - d3 - d9;
    dv.I = d10 + d2 - d4 - d5 - d6;
    dv.O = d5 - d7 - d8;
    dv.D = d6 + d7;
    dv.Q = d9 - d10 - d11;
    if (kind == ModelKind::full) {
        dv.R = d4 + d8 + d11;
        dv.Ra = d3;
    } else {
        // untested chain: asymptomatic recoveries land in R
        dv.R = d4 + d8 + d11 + d3;
        dv.Ra = 0;
    }
    return dv;
}

StateVector FlowVector::apply(const StateVector& v, ModelKind kind) const {
    StateDelta dv = delta(kind);
    return {v.S + dv.S, v.A + dv.A, v.I + dv.I, v.R + dv.R,
            v.O + dv.O, v.D + dv.D, v.Q + dv.Q, v.Ra + dv.Ra};
}

namespace {
std::string budget_message(std::uint64_t count, std::uint64_t limit) {
    std::ostringstream os;
    os << "state budget exceeded: " << count << " states, limit " << limit;
    return os.str();
}
}  // namespace

BudgetError::BudgetError(std::uint64_t count_, std::uint64_t limit_)
    : std::runtime_error(budget_message(count_, limit_)), count(count_), limit(limit_) {}

}  // namespace sairod
