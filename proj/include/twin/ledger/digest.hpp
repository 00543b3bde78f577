#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace twin::ledger {

/// 32-byte SHA-256 digest. Rendered as 64 lowercase hex characters.
class Digest {
public:
    static constexpr std::size_t size = 32;

    Digest() = default;
    explicit Digest(const std::array<std::uint8_t, size>& bytes) : bytes_(bytes) {}

    /// Parses exactly 64 lowercase hex characters; throws LedgerError(Malformed) otherwise.
    static Digest from_hex(std::string_view hex);

    std::string hex() const;
    const std::array<std::uint8_t, size>& bytes() const noexcept { return bytes_; }

    auto operator<=>(const Digest&) const = default;

private:
    std::array<std::uint8_t, size> bytes_{};
};

Digest digest(std::span<const std::uint8_t> bytes);
Digest digest(std::string_view bytes);

/// digest(left || right), the Merkle node combiner.
Digest digest_pair(const Digest& left, const Digest& right);

} // namespace twin::ledger
