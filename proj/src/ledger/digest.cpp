#include "twin/ledger/digest.hpp"

#include <openssl/evp.h>

#include "twin/ledger/types.hpp"

namespace twin::ledger {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

} // namespace

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 2 * size) {
        throw LedgerError(Errc::Malformed, "digest must be 64 hex characters");
    }
    std::array<std::uint8_t, size> out{};
    for (std::size_t i = 0; i < size; ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) {
            throw LedgerError(Errc::Malformed, "digest contains non-lowercase-hex character");
        }
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return Digest(out);
}

std::string Digest::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(2 * size, '0');
    for (std::size_t i = 0; i < size; ++i) {
        out[2 * i] = kDigits[bytes_[i] >> 4];
        out[2 * i + 1] = kDigits[bytes_[i] & 0x0f];
    }
    return out;
}

Digest digest(std::span<const std::uint8_t> bytes) {
    std::array<std::uint8_t, Digest::size> out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != Digest::size) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return Digest(out);
}

Digest digest(std::string_view bytes) {
    return digest(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

Digest digest_pair(const Digest& left, const Digest& right) {
    std::array<std::uint8_t, 2 * Digest::size> buf{};
    std::copy(left.bytes().begin(), left.bytes().end(), buf.begin());
    std::copy(right.bytes().begin(), right.bytes().end(), buf.begin() + Digest::size);
    return digest(std::span<const std::uint8_t>(buf));
}

} // namespace twin::ledger
