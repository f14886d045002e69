#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "fedq/expr/signomial.hpp"

namespace fedq::expr {

/// Dense array of signomials with every axis of the same extent.
template <std::size_t Rank>
class SigTensor {
public:
    SigTensor() = default;
    SigTensor(std::size_t extent, std::size_t field_dim)
        : extent_(extent), data_(ipow(extent), Signomial(field_dim)) {}

    [[nodiscard]] std::size_t extent() const { return extent_; }

    template <class... I>
    Signomial& operator()(I... idx) {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }
    template <class... I>
    const Signomial& operator()(I... idx) const {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<std::size_t>(idx)...})];
    }

    [[nodiscard]] const std::vector<Signomial>& data() const { return data_; }

    /// Visits every multi-index in row-major order.
    void for_each_index(const std::function<void(const std::array<std::size_t, Rank>&)>& fn) const {
        std::array<std::size_t, Rank> idx{};
        for (std::size_t flat = 0; flat < data_.size(); ++flat) {
            std::size_t rest = flat;
            for (std::size_t r = Rank; r-- > 0;) {
                idx[r] = rest % extent_;
                rest /= extent_;
            }
            fn(idx);
        }
    }

    [[nodiscard]] const Signomial& at(const std::array<std::size_t, Rank>& idx) const { return data_[offset(idx)]; }
    Signomial& at(const std::array<std::size_t, Rank>& idx) { return data_[offset(idx)]; }

    [[nodiscard]] bool all_zero() const {
        for (const auto& s : data_)
            if (!s.is_zero()) return false;
        return true;
    }

private:
    [[nodiscard]] std::size_t ipow(std::size_t e) const {
        std::size_t r = 1;
        for (std::size_t i = 0; i < Rank; ++i) r *= e;
        return r;
    }
    [[nodiscard]] std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
        std::size_t o = 0;
        for (std::size_t r = 0; r < Rank; ++r) o = o * extent_ + idx[r];
        return o;
    }

    std::size_t extent_ = 0;
    std::vector<Signomial> data_;
};

using SigMatrix = SigTensor<2>;

} // namespace fedq::expr
