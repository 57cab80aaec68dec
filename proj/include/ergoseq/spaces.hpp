#pragma once

// Symbolic symmetric sequence spaces: l_p (1 <= p < inf), c0 and l_inf.

#include <span>
#include <string>

#include "ergoseq/sequence.hpp"

namespace ergoseq {

enum class SpaceKind { Lp, C0, Linf };

class SpaceDescriptor {
public:
    static SpaceDescriptor lp(double p);
    static SpaceDescriptor c0() { return SpaceDescriptor(SpaceKind::C0, 0.0); }
    static SpaceDescriptor linf() { return SpaceDescriptor(SpaceKind::Linf, 0.0); }

    SpaceKind kind() const noexcept { return kind_; }
    /// Exponent for Lp; zero otherwise.
    double p() const noexcept { return p_; }

    std::string name() const;

    friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

private:
    SpaceDescriptor(SpaceKind kind, double p) : kind_(kind), p_(p) {}

    SpaceKind kind_;
    double p_;
};

enum class Membership { Member, NonMember, Undecidable };

const char* to_string(Membership m) noexcept;

Membership contains(const SpaceDescriptor& space, const TruncatedSequence& x);

/// Whether the constant sequence {1, 1, ...} belongs to the space.
bool contains_one(const SpaceDescriptor& space) noexcept;

/// Uniform individual ergodic theorem property: averages of every element
/// under every DS operator converge in sup norm. Holds exactly when the
/// space does not contain the constant-one sequence.
bool uiet(const SpaceDescriptor& space) noexcept;

/// Finite shadow of the Fatou property for l_p: given x_k -> x uniformly with
/// ‖x_k − x‖_inf non-increasing, checks ‖x‖_p <= sup_k ‖x_k‖_p + min_k ‖x_k − x‖_p
/// (+ rounding). The last term is what remains of the limit for a finite family.
/// Throws PreconditionViolated when the family is not uniformly approaching x.
bool fatou_check(const SpaceDescriptor& space, std::span<const TruncatedSequence> family, const TruncatedSequence& x);

}  // namespace ergoseq
