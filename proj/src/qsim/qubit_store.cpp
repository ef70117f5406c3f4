#include "sqss/qsim/qubit_store.hpp"

#include "sqss/errors.hpp"

namespace sqss::qsim {

int QubitStore::add_group(StateVector state) {
    allocated_ += state.num_qubits();
    groups_.push_back(std::move(state));
    return static_cast<int>(groups_.size()) - 1;
}

const StateVector& QubitStore::group(int g) const {
    if (g < 0 || g >= group_count()) throw InvalidArgument("QubitStore::group: bad group index");
    return groups_[static_cast<std::size_t>(g)];
}

void QubitStore::check_ref(QubitRef r, const char* who) const {
    if (r.group < 0 || r.group >= group_count())
        throw InvalidArgument(std::string(who) + ": bad group index");
    if (r.qubit < 0 || r.qubit >= groups_[static_cast<std::size_t>(r.group)].num_qubits())
        throw InvalidArgument(std::string(who) + ": bad qubit index");
}

QubitRef QubitStore::append_zero_qubit(QubitRef anchor) {
    check_ref(anchor, "QubitStore::append_zero_qubit");
    StateVector& s = groups_[static_cast<std::size_t>(anchor.group)];
    s = qsim::append_zero_qubit(s);
    ++allocated_;
    return QubitRef{anchor.group, s.num_qubits() - 1};
}

void QubitStore::apply(int g, const GateSpec& gate) {
    if (g < 0 || g >= group_count()) throw InvalidArgument("QubitStore::apply: bad group index");
    StateVector& s = groups_[static_cast<std::size_t>(g)];
    s = apply_gate(s, gate);
}

void QubitStore::apply_h(QubitRef r) {
    check_ref(r, "QubitStore::apply_h");
    apply(r.group, GateSpec::h(r.qubit));
}

int QubitStore::measure_z(QubitRef r, Rng& rng) {
    check_ref(r, "QubitStore::measure_z");
    StateVector& s = groups_[static_cast<std::size_t>(r.group)];
    auto [bit, post] = qsim::measure_z(s, r.qubit, rng);
    s = std::move(post);
    return bit;
}

double QubitStore::collapse(QubitRef r, int bit) {
    check_ref(r, "QubitStore::collapse");
    StateVector& s = groups_[static_cast<std::size_t>(r.group)];
    auto [prob, post] = qsim::collapse(s, r.qubit, bit);
    if (prob > 0.0) s = std::move(post);
    return prob;
}

Matrix QubitStore::reduced_density(QubitRef r) const {
    check_ref(r, "QubitStore::reduced_density");
    return qsim::reduced_density(groups_[static_cast<std::size_t>(r.group)], r.qubit);
}

} // namespace sqss::qsim
