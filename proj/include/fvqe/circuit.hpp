// Copyright 2026 The fvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include "fvqe/common.hpp"

namespace fvqe {

enum class PauliAxis { X, Y, Z };

inline char axis_letter(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return 'x';
        case PauliAxis::Y: return 'y';
        case PauliAxis::Z: return 'z';
    }
    return '?';
}

/// Gate-list IR. Rotations are R_G(theta) = exp(-i theta G / 2) with G a
/// Pauli string over the support; the angle either comes from a parameter
/// slot or is baked in. A rotation may carry one control qubit (used by the
/// overlap-test construction).
struct Gate {
    enum class Kind { Rotation, Cnot, Hadamard };

    Kind kind = Kind::Rotation;
    std::vector<std::pair<int, PauliAxis>> support;  // rotation support (qubit, axis)
    int slot = -1;                                   // parameter slot, -1 = fixed angle
    double angle = 0.0;                              // fixed angle when slot < 0
    int control = -1;                                // rotation control qubit, -1 = none
    int q0 = -1;                                     // cnot control / hadamard qubit
    int q1 = -1;                                     // cnot target

    static Gate rotation(int qubit, PauliAxis axis, int slot) {
        Gate g;
        g.support = {{qubit, axis}};
        g.slot = slot;
        return g;
    }

    static Gate rotation_fixed(std::vector<std::pair<int, PauliAxis>> support, double angle) {
        Gate g;
        g.support = std::move(support);
        g.angle = angle;
        return g;
    }

    static Gate controlled_rotation_fixed(int control, int qubit, PauliAxis axis, double angle) {
        Gate g;
        g.support = {{qubit, axis}};
        g.angle = angle;
        g.control = control;
        return g;
    }

    static Gate cnot(int control, int target) {
        Gate g;
        g.kind = Kind::Cnot;
        g.q0 = control;
        g.q1 = target;
        return g;
    }

    static Gate hadamard(int qubit) {
        Gate g;
        g.kind = Kind::Hadamard;
        g.q0 = qubit;
        return g;
    }

    std::vector<int> qubits() const {
        std::vector<int> qs;
        switch (kind) {
            case Kind::Rotation:
                for (const auto& [q, axis] : support) qs.push_back(q);
                if (control >= 0) qs.push_back(control);
                break;
            case Kind::Cnot:
                qs.push_back(q0);
                qs.push_back(q1);
                break;
            case Kind::Hadamard: qs.push_back(q0); break;
        }
        return qs;
    }

    bool entangling() const { return qubits().size() > 1; }
};

struct Circuit {
    int width = 0;
    int param_count = 0;
    std::vector<Gate> gates;

    /// Debug listing, one gate per line: "GATE kind qubits [slot]".
    void dump(std::ostream& out) const {
        for (const auto& g : gates) {
            out << "GATE ";
            switch (g.kind) {
                case Gate::Kind::Rotation: {
                    out << (g.control >= 0 ? "c-rot-" : "rot-");
                    for (const auto& [q, axis] : g.support) out << axis_letter(axis);
                    if (g.control >= 0) out << ' ' << g.control;
                    for (const auto& [q, axis] : g.support) out << ' ' << q;
                    if (g.slot >= 0) {
                        out << " [" << g.slot << "]";
                    } else {
                        out << " angle=" << format_double(g.angle);
                    }
                    break;
                }
                case Gate::Kind::Cnot: out << "cnot " << g.q0 << ' ' << g.q1; break;
                case Gate::Kind::Hadamard: out << "h " << g.q0; break;
            }
            out << '\n';
        }
    }
};

/// Range checks plus the parameter-shift prerequisite: every slot in
/// 0..param_count-1 is referenced by exactly one rotation gate.
inline void validate_circuit(const Circuit& circuit) {
    std::vector<int> slot_uses(static_cast<std::size_t>(circuit.param_count), 0);
    for (const auto& g : circuit.gates) {
        for (int q : g.qubits()) {
            if (q < 0 || q >= circuit.width) throw ValidationError("gate qubit out of range");
        }
        if (g.kind == Gate::Kind::Rotation) {
            if (g.support.empty()) throw ValidationError("rotation needs a support");
            if (g.slot >= 0) {
                if (g.slot >= circuit.param_count) throw ValidationError("slot out of range");
                ++slot_uses[static_cast<std::size_t>(g.slot)];
            }
        }
        if (g.kind == Gate::Kind::Cnot && g.q0 == g.q1) {
            throw ValidationError("cnot control equals target");
        }
    }
    for (int uses : slot_uses) {
        if (uses != 1) throw ValidationError("each parameter slot must be used exactly once");
    }
}

}  // namespace fvqe
