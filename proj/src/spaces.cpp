#include "ergoseq/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergoseq/error.hpp"

namespace ergoseq {

SpaceDescriptor SpaceDescriptor::lp(double p) {
    if (!(p >= 1.0) || std::isinf(p)) throw PreconditionViolated("lp requires 1 <= p < inf");
    return SpaceDescriptor(SpaceKind::Lp, p);
}

std::string SpaceDescriptor::name() const {
    switch (kind_) {
        case SpaceKind::Lp: {
            std::string s = std::to_string(p_);
            s.erase(s.find_last_not_of('0') + 1);
            if (s.back() == '.') s.pop_back();
            return "l" + s;
        }
        case SpaceKind::C0:
            return "c0";
        case SpaceKind::Linf:
            return "linf";
    }
    return {};
}

const char* to_string(Membership m) noexcept {
    switch (m) {
        case Membership::Member:
            return "member";
        case Membership::NonMember:
            return "non_member";
        case Membership::Undecidable:
            return "undecidable";
    }
    return "";
}

Membership contains(const SpaceDescriptor& space, const TruncatedSequence& x) {
    if (space.kind() == SpaceKind::Linf) return Membership::Member;
    switch (x.tail().kind()) {
        case TailKind::Zero:
            return Membership::Member;
        case TailKind::Constant:
            return Membership::NonMember;
        case TailKind::Bounded:
            return Membership::Undecidable;
    }
    return Membership::Undecidable;
}

bool contains_one(const SpaceDescriptor& space) noexcept { return space.kind() == SpaceKind::Linf; }

bool uiet(const SpaceDescriptor& space) noexcept { return !contains_one(space); }

bool fatou_check(const SpaceDescriptor& space, std::span<const TruncatedSequence> family, const TruncatedSequence& x) {
    if (space.kind() != SpaceKind::Lp) throw PreconditionViolated("fatou_check is defined for lp spaces");
    if (family.empty()) throw PreconditionViolated("fatou_check needs a nonempty family");
    if (!x.finitely_supported()) throw PreconditionViolated("limit must have a zero tail");

    double previous = std::numeric_limits<double>::infinity();
    double sup_norm = 0.0;
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& xk : family) {
        if (!xk.finitely_supported()) throw PreconditionViolated("family members must have zero tails");
        const double gap = sup_distance(xk, x);
        if (gap > previous) throw PreconditionViolated("‖x_k − x‖_inf is not non-increasing along the family");
        previous = gap;
        sup_norm = std::max(sup_norm, norm(xk, space.p()));
        closest = std::min(closest, norm(xk - x, space.p()));
    }
    // A finite family only reaches x up to its closest member; that distance
    // stands in for the limit k -> inf.
    const double eps = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, sup_norm);
    return norm(x, space.p()) <= sup_norm + closest + eps;
}

}  // namespace ergoseq
