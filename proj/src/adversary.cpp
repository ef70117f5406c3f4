#include "sqss/adversary.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "sqss/errors.hpp"

namespace sqss::adv {

using qsim::cxd;
using qsim::GateSpec;
using qsim::Matrix;
using qsim::QubitRef;
using qsim::QubitStore;
using qsim::Rng;

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::Dcna: return "dcna";
        case Kind::IrMeasure: return "ir-measure";
        case Kind::IrFake: return "ir-fake";
        case Kind::Collective: return "collective";
        case Kind::Collusion: return "collusion";
    }
    throw InternalError("to_string: unknown adversary kind");
}

Kind kind_from_string(std::string_view text) {
    if (text == "none") return Kind::None;
    if (text == "dcna") return Kind::Dcna;
    if (text == "ir-measure") return Kind::IrMeasure;
    if (text == "ir-fake") return Kind::IrFake;
    if (text == "collective") return Kind::Collective;
    if (text == "collusion") return Kind::Collusion;
    throw InvalidArgument("unknown adversary '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// CollectiveSpec
// ---------------------------------------------------------------------------

namespace {

double norm2(const std::vector<cxd>& v) {
    double s = 0.0;
    for (const cxd& x : v) s += std::norm(x);
    return s;
}

cxd inner(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    cxd s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Image vectors of |0>|e> and |1>|e> in the full 2d-dimensional space.
std::pair<std::vector<cxd>, std::vector<cxd>> spec_images(const CollectiveSpec& spec) {
    const std::size_t d = static_cast<std::size_t>(spec.ancilla_dim());
    if (spec.mode == CollectiveSpec::Mode::RandomUnitary) {
        std::vector<cxd> img0(2 * d), img1(2 * d);
        for (std::size_t r = 0; r < 2 * d; ++r) {
            img0[r] = spec.unitary(r, 0);
            img1[r] = spec.unitary(r, d);
        }
        return {img0, img1};
    }
    std::vector<cxd> img0(2 * d, cxd{0.0, 0.0}), img1(2 * d, cxd{0.0, 0.0});
    for (std::size_t i = 0; i < d; ++i) {
        img0[i] = spec.a * spec.e00[i];
        img0[d + i] = spec.b * spec.e01[i];
        img1[i] = spec.c * spec.e10[i];
        img1[d + i] = spec.d * spec.e11[i];
    }
    return {img0, img1};
}

std::vector<cxd> random_unit_vector(Rng& rng, std::size_t dim) {
    std::vector<cxd> v(dim);
    double n2 = 0.0;
    do {
        for (auto& x : v) x = cxd{rng.normal(), rng.normal()};
        n2 = norm2(v);
    } while (n2 < 1e-12);
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= scale;
    return v;
}

} // namespace

int CollectiveSpec::ancilla_dim() const {
    if (mode == Mode::RandomUnitary) return 2;
    return static_cast<int>(e00.size());
}

int CollectiveSpec::ancilla_qubits() const {
    return ancilla_dim() == 2 ? 1 : 2;
}

void CollectiveSpec::validate() const {
    if (mode == Mode::RandomUnitary) {
        if (unitary.dim() != 4) throw InvalidArgument("CollectiveSpec: unitary must be 4x4");
        if (!unitary.is_unitary()) throw InvalidArgument("CollectiveSpec: matrix is not unitary");
        return;
    }
    const std::size_t dim = e00.size();
    if (dim != 2 && dim != 4)
        throw InvalidArgument("CollectiveSpec: ancilla dimension must be 2 or 4");
    if (e01.size() != dim || e10.size() != dim || e11.size() != dim)
        throw InvalidArgument("CollectiveSpec: ancilla vectors must share one dimension");
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > qsim::kTolNumeric ||
        std::abs(std::norm(c) + std::norm(d) - 1.0) > qsim::kTolNumeric)
        throw InvalidArgument("CollectiveSpec: coefficients are not normalized");
    const auto [img0, img1] = spec_images(*this);
    if (std::abs(norm2(img0) - 1.0) > qsim::kTolNumeric ||
        std::abs(norm2(img1) - 1.0) > qsim::kTolNumeric ||
        std::abs(inner(img0, img1)) > qsim::kTolNumeric)
        throw InvalidArgument("CollectiveSpec: image vectors are not orthonormal");
}

CollectiveSpec CollectiveSpec::structured(cxd a, cxd b, cxd c, cxd d, std::vector<cxd> e00,
                                          std::vector<cxd> e01, std::vector<cxd> e10,
                                          std::vector<cxd> e11) {
    CollectiveSpec spec;
    spec.mode = Mode::Structured;
    spec.a = a;
    spec.b = b;
    spec.c = c;
    spec.d = d;
    spec.e00 = std::move(e00);
    spec.e01 = std::move(e01);
    spec.e10 = std::move(e10);
    spec.e11 = std::move(e11);
    spec.validate();
    return spec;
}

CollectiveSpec CollectiveSpec::random_unitary_mode(Matrix u) {
    CollectiveSpec spec;
    spec.mode = Mode::RandomUnitary;
    spec.unitary = std::move(u);
    spec.validate();
    return spec;
}

CollectiveSpec CollectiveSpec::identity_corner(int ancilla_dim) {
    const std::size_t d = static_cast<std::size_t>(ancilla_dim);
    std::vector<cxd> ket0(d, cxd{0.0, 0.0});
    ket0[0] = 1.0;
    return structured(1.0, 0.0, 0.0, 1.0, ket0, ket0, ket0, ket0);
}

CollectiveSpec CollectiveSpec::cnot_equivalent() {
    std::vector<cxd> ket0{1.0, 0.0}, ket1{0.0, 1.0};
    return structured(1.0, 0.0, 0.0, 1.0, ket0, ket0, ket1, ket1);
}

CollectiveSpec CollectiveSpec::draw_random_unitary(Rng& rng) {
    // Gram-Schmidt over Gaussian columns gives a Haar-ish 4x4 unitary;
    // distribution details are irrelevant, validity is what matters.
    Matrix u(4);
    std::vector<std::vector<cxd>> cols;
    while (cols.size() < 4) {
        std::vector<cxd> v = random_unit_vector(rng, 4);
        for (const auto& prev : cols) {
            const cxd proj = inner(prev, v);
            for (std::size_t i = 0; i < 4; ++i) v[i] -= proj * prev[i];
        }
        const double n2 = norm2(v);
        if (n2 < 1e-8) continue;
        const double scale = 1.0 / std::sqrt(n2);
        for (auto& x : v) x *= scale;
        cols.push_back(std::move(v));
    }
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r) u(r, c) = cols[c][r];
    return random_unitary_mode(std::move(u));
}

CollectiveSpec CollectiveSpec::draw_random_structured(Rng& rng, int ancilla_dim) {
    const std::size_t d = static_cast<std::size_t>(ancilla_dim);
    std::vector<cxd> img0 = random_unit_vector(rng, 2 * d);
    std::vector<cxd> img1;
    double n2 = 0.0;
    do {
        img1 = random_unit_vector(rng, 2 * d);
        const cxd proj = inner(img0, img1);
        for (std::size_t i = 0; i < 2 * d; ++i) img1[i] -= proj * img0[i];
        n2 = norm2(img1);
    } while (n2 < 1e-8);
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& x : img1) x *= scale;

    auto split = [d](const std::vector<cxd>& img, cxd& coeff, std::vector<cxd>& evec,
                     std::size_t offset) {
        std::vector<cxd> part(img.begin() + static_cast<std::ptrdiff_t>(offset),
                              img.begin() + static_cast<std::ptrdiff_t>(offset + d));
        const double n = std::sqrt(norm2(part));
        coeff = n;
        if (n < 1e-12) {
            evec.assign(d, cxd{0.0, 0.0});
            evec[0] = 1.0;
        } else {
            for (auto& x : part) x /= n;
            evec = std::move(part);
        }
    };

    CollectiveSpec spec;
    spec.mode = Mode::Structured;
    split(img0, spec.a, spec.e00, 0);
    split(img0, spec.b, spec.e01, d);
    split(img1, spec.c, spec.e10, 0);
    split(img1, spec.d, spec.e11, d);
    spec.validate();
    return spec;
}

CollectiveSpec CollectiveSpec::draw_zero_error(Rng& rng, int ancilla_dim) {
    const std::size_t d = static_cast<std::size_t>(ancilla_dim);
    const std::vector<cxd> v = random_unit_vector(rng, d);
    const double theta = 2.0 * std::numbers::pi * rng.real();
    const cxd phase{std::cos(theta), std::sin(theta)};
    std::vector<cxd> ket0(d, cxd{0.0, 0.0});
    ket0[0] = 1.0;
    return structured(phase, 0.0, 0.0, phase, v, ket0, ket0, v);
}

namespace {

nlohmann::ordered_json complex_json(const cxd& z) {
    return nlohmann::ordered_json::array({z.real(), z.imag()});
}

cxd complex_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument("CollectiveSpec: complex entries must be [re, im]");
    return cxd{j[0].get<double>(), j[1].get<double>()};
}

nlohmann::ordered_json vector_json(const std::vector<cxd>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const cxd& z : v) arr.push_back(complex_json(z));
    return arr;
}

std::vector<cxd> vector_from_json(const nlohmann::json& j) {
    std::vector<cxd> out;
    for (const auto& z : j) out.push_back(complex_from_json(z));
    return out;
}

} // namespace

std::string CollectiveSpec::to_json() const {
    nlohmann::ordered_json j;
    if (mode == Mode::RandomUnitary) {
        j["mode"] = "random_unitary";
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < 4; ++r) {
            auto row = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < 4; ++c) row.push_back(complex_json(unitary(r, c)));
            rows.push_back(row);
        }
        j["unitary"] = rows;
    } else {
        j["mode"] = "structured";
        j["a"] = complex_json(a);
        j["b"] = complex_json(b);
        j["c"] = complex_json(c);
        j["d"] = complex_json(d);
        j["e00"] = vector_json(e00);
        j["e01"] = vector_json(e01);
        j["e10"] = vector_json(e10);
        j["e11"] = vector_json(e11);
    }
    return j.dump(2);
}

CollectiveSpec CollectiveSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("CollectiveSpec: bad JSON: ") + e.what());
    }
    try {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "random_unitary") {
            Matrix u(4);
            const auto& rows = j.at("unitary");
            if (!rows.is_array() || rows.size() != 4)
                throw InvalidArgument("CollectiveSpec: unitary must have 4 rows");
            for (std::size_t r = 0; r < 4; ++r) {
                if (rows[r].size() != 4) throw InvalidArgument("CollectiveSpec: unitary must have 4 columns");
                for (std::size_t c = 0; c < 4; ++c) u(r, c) = complex_from_json(rows[r][c]);
            }
            return random_unitary_mode(std::move(u));
        }
        if (mode == "structured") {
            return structured(complex_from_json(j.at("a")), complex_from_json(j.at("b")),
                              complex_from_json(j.at("c")), complex_from_json(j.at("d")),
                              vector_from_json(j.at("e00")), vector_from_json(j.at("e01")),
                              vector_from_json(j.at("e10")), vector_from_json(j.at("e11")));
        }
        throw InvalidArgument("CollectiveSpec: mode must be 'structured' or 'random_unitary'");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("CollectiveSpec: missing or malformed field: ") + e.what());
    }
}

CollectiveSpec CollectiveSpec::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("CollectiveSpec: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

GateSpec build_collective_unitary(const CollectiveSpec& spec) {
    spec.validate();
    const std::size_t d = static_cast<std::size_t>(spec.ancilla_dim());
    const std::size_t dim = 2 * d;
    const int qubits = 1 + spec.ancilla_qubits();

    std::vector<int> targets(static_cast<std::size_t>(qubits));
    for (int i = 0; i < qubits; ++i) targets[static_cast<std::size_t>(i)] = i;

    if (spec.mode == CollectiveSpec::Mode::RandomUnitary)
        return GateSpec::unitary(spec.unitary, targets);

    const auto [img0, img1] = spec_images(spec);
    std::vector<std::vector<cxd>> columns(dim);
    columns[0] = img0;
    columns[d] = img1;

    // fill the unreachable complement deterministically: Gram-Schmidt over
    // the canonical basis in index order
    std::vector<std::vector<cxd>> placed{img0, img1};
    std::size_t candidate = 0;
    for (std::size_t col = 0; col < dim; ++col) {
        if (!columns[col].empty()) continue;
        std::vector<cxd> v;
        for (; candidate < dim; ++candidate) {
            v.assign(dim, cxd{0.0, 0.0});
            v[candidate] = 1.0;
            for (const auto& prev : placed) {
                const cxd proj = inner(prev, v);
                for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * prev[i];
            }
            const double n2 = norm2(v);
            if (n2 > 1e-6) {
                const double scale = 1.0 / std::sqrt(n2);
                for (auto& x : v) x *= scale;
                ++candidate;
                break;
            }
        }
        if (v.empty() || norm2(v) < 0.5)
            throw InternalError("build_collective_unitary: completion ran out of directions");
        columns[col] = v;
        placed.push_back(std::move(v));
    }

    Matrix u(dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) u(r, c) = columns[c][r];
    return GateSpec::unitary(std::move(u), targets);
}

// ---------------------------------------------------------------------------
// Channel taps
// ---------------------------------------------------------------------------

QubitRef dcna_tap(QubitStore& store, QubitRef transit) {
    const QubitRef ancilla = store.append_zero_qubit(transit);
    store.apply(transit.group, GateSpec::cnot(transit.qubit, ancilla.qubit));
    return ancilla;
}

int ir_measure_tap(QubitStore& store, QubitRef transit, Rng& rng) {
    return store.measure_z(transit, rng);
}

IrFakeTapResult ir_fake_tap(QubitStore& store, QubitRef transit, Rng& rng) {
    const int g = store.add_group(qsim::prepare_basis_state(rng.bit() ? "1" : "0"));
    return IrFakeTapResult{QubitRef{g, 0}, transit};
}

std::vector<QubitRef> collective_tap(QubitStore& store, QubitRef transit,
                                     const CollectiveSpec& spec) {
    const GateSpec canonical = build_collective_unitary(spec);
    std::vector<QubitRef> ancillas;
    std::vector<int> targets{transit.qubit};
    for (int i = 0; i < spec.ancilla_qubits(); ++i) {
        const QubitRef anc = store.append_zero_qubit(transit);
        ancillas.push_back(anc);
        targets.push_back(anc.qubit);
    }
    store.apply(transit.group, GateSpec::unitary(canonical.matrix, targets));
    return ancillas;
}

// ---------------------------------------------------------------------------
// Adversary implementations
// ---------------------------------------------------------------------------

namespace {

/// Shared share-reconstruction walk: visit the message slots of every
/// participant in slot order and XOR this model's per-slot bit into the key
/// guess.
template <typename BitFn>
Bits reconstruct_key(const SessionConfig& config,
                     const std::vector<std::vector<std::size_t>>& decoy_positions, BitFn&& bit_of) {
    Bits key(static_cast<std::size_t>(2 * config.secret_len), 0);
    for (int i = 0; i < config.participants; ++i) {
        std::vector<bool> is_decoy(static_cast<std::size_t>(config.sequence_len()), false);
        for (std::size_t p : decoy_positions[static_cast<std::size_t>(i)]) is_decoy[p] = true;
        int j = 0;
        for (int slot = 0; slot < config.sequence_len(); ++slot) {
            if (is_decoy[static_cast<std::size_t>(slot)]) continue;
            key[static_cast<std::size_t>(j)] ^= static_cast<std::uint8_t>(bit_of(i, slot) & 1);
            ++j;
        }
    }
    return key;
}

class NoneAdversary final : public Adversary {
public:
    Kind kind() const override { return Kind::None; }
};

class CollusionAdversary final : public Adversary {
public:
    Kind kind() const override { return Kind::Collusion; }
};

class DcnaAdversary final : public Adversary {
public:
    Kind kind() const override { return Kind::Dcna; }

    QubitRef tap(QubitStore& store, QubitRef q, int participant, int slot, Rng&) override {
        ancillas_[{participant, slot}] = dcna_tap(store, q);
        return q;
    }

    std::optional<Bits> guess_key(QubitStore& store, const SessionConfig& config,
                                  const std::vector<std::vector<std::size_t>>& decoy_positions,
                                  Rng& rng) override {
        return reconstruct_key(config, decoy_positions, [&](int i, int slot) {
            return store.measure_z(ancillas_.at({i, slot}), rng);
        });
    }

private:
    std::map<std::pair<int, int>, QubitRef> ancillas_;
};

class IrMeasureAdversary final : public Adversary {
public:
    Kind kind() const override { return Kind::IrMeasure; }

    QubitRef tap(QubitStore& store, QubitRef q, int participant, int slot, Rng& rng) override {
        recorded_[{participant, slot}] = ir_measure_tap(store, q, rng);
        return q;
    }

    std::optional<Bits> guess_key(QubitStore&, const SessionConfig& config,
                                  const std::vector<std::vector<std::size_t>>& decoy_positions,
                                  Rng&) override {
        return reconstruct_key(config, decoy_positions,
                               [&](int i, int slot) { return recorded_.at({i, slot}); });
    }

private:
    std::map<std::pair<int, int>, int> recorded_;
};

class IrFakeAdversary final : public Adversary {
public:
    Kind kind() const override { return Kind::IrFake; }

    QubitRef tap(QubitStore& store, QubitRef q, int participant, int slot, Rng& rng) override {
        const IrFakeTapResult r = ir_fake_tap(store, q, rng);
        stored_[{participant, slot}] = r.stored;
        return r.forwarded;
    }

    std::optional<Bits> guess_key(QubitStore& store, const SessionConfig& config,
                                  const std::vector<std::vector<std::size_t>>& decoy_positions,
                                  Rng& rng) override {
        return reconstruct_key(config, decoy_positions, [&](int i, int slot) {
            return store.measure_z(stored_.at({i, slot}), rng);
        });
    }

private:
    std::map<std::pair<int, int>, QubitRef> stored_;
};

class CollectiveAdversary final : public Adversary {
public:
    explicit CollectiveAdversary(CollectiveSpec spec)
        : spec_(std::move(spec)), canonical_(build_collective_unitary(spec_)) {}

    Kind kind() const override { return Kind::Collective; }

    QubitRef tap(QubitStore& store, QubitRef q, int participant, int slot, Rng&) override {
        std::vector<QubitRef> ancillas;
        std::vector<int> targets{q.qubit};
        for (int i = 0; i < spec_.ancilla_qubits(); ++i) {
            const QubitRef anc = store.append_zero_qubit(q);
            ancillas.push_back(anc);
            targets.push_back(anc.qubit);
        }
        store.apply(q.group, GateSpec::unitary(canonical_.matrix, targets));
        ancillas_[{participant, slot}] = std::move(ancillas);
        return q;
    }

private:
    CollectiveSpec spec_;
    GateSpec canonical_;
    std::map<std::pair<int, int>, std::vector<QubitRef>> ancillas_;
};

} // namespace

std::unique_ptr<Adversary> make_adversary(Kind kind, std::optional<CollectiveSpec> spec) {
    switch (kind) {
        case Kind::None: return std::make_unique<NoneAdversary>();
        case Kind::Collusion: return std::make_unique<CollusionAdversary>();
        case Kind::Dcna: return std::make_unique<DcnaAdversary>();
        case Kind::IrMeasure: return std::make_unique<IrMeasureAdversary>();
        case Kind::IrFake: return std::make_unique<IrFakeAdversary>();
        case Kind::Collective:
            if (!spec) throw InvalidArgument("make_adversary: collective attack needs a CollectiveSpec");
            return std::make_unique<CollectiveAdversary>(std::move(*spec));
    }
    throw InternalError("make_adversary: unknown kind");
}

CollusionOutcome collusion_guess(const std::vector<Bits>& dishonest_shares,
                                 const DealerLedger& ledger, Rng& rng) {
    const std::size_t m = ledger.retained_halves.size();
    if (dishonest_shares.size() != m - 1 && dishonest_shares.size() != m)
        throw InvalidArgument("collusion_guess: expected M-1 (or degenerate M) shares");

    Bits acc(ledger.secret_positions.size(), 0);
    for (const Bits& share : dishonest_shares) {
        const Bits at_secret = bits_at(share, ledger.secret_positions);
        acc = xor_bits(acc, at_secret);
    }
    if (dishonest_shares.size() == m - 1) {
        // the withheld share is guessed uniformly, bit by bit
        acc = xor_bits(acc, random_bits(rng, acc.size()));
    }
    return CollusionOutcome{acc, acc == ledger.secret};
}

} // namespace sqss::adv
