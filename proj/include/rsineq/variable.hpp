#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rsineq {

/// An observable name such as `X1`, `Y2` or a bare `J`. Orders by (party, index)
/// with a bare letter sorting before any indexed one.
struct VariableId {
    char party = 'X';
    std::optional<std::uint32_t> index;

    VariableId() = default;
    VariableId(char p, std::optional<std::uint32_t> i = std::nullopt);

    /// Throws Error(InvalidArgument) unless `text` is `<Letter><digits>?`.
    static VariableId parse(std::string_view text);

    [[nodiscard]] std::string str() const;

    friend bool operator==(const VariableId&, const VariableId&) = default;
    friend std::strong_ordering operator<=>(const VariableId&, const VariableId&) = default;
};

}  // namespace rsineq
