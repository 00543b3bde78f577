#include "twin/ledger/transaction.hpp"

#include <algorithm>

#include "json_access.hpp"
#include "twin/ledger/canonical.hpp"

namespace twin::ledger {

using detail::get_array;
using detail::get_string;
using detail::is_scalar;

Value encode_read_set(const std::vector<ReadEntry>& reads) {
    Value out = Value::array();
    for (const auto& r : reads) out.push_back(Value::array({r.key, r.version}));
    return out;
}

Value encode_write_set(const std::vector<WriteEntry>& writes) {
    Value out = Value::array();
    for (const auto& w : writes) out.push_back(Value::array({w.key, w.value}));
    return out;
}

Value Transaction::body() const {
    return Value{
        {"args", args},
        {"contract", contract},
        {"method", method},
        {"nonce", nonce},
        {"read_set", encode_read_set(read_set)},
        {"submitter", submitter},
        {"write_set", encode_write_set(write_set)},
    };
}

Digest Transaction::compute_id() const {
    return digest(canonical_encode(body()));
}

Digest Transaction::leaf() const {
    return digest(canonical_encode(to_json()));
}

void Transaction::seal() {
    std::sort(write_set.begin(), write_set.end(),
              [](const WriteEntry& a, const WriteEntry& b) { return a.key < b.key; });
    auto dup = std::adjacent_find(write_set.begin(), write_set.end(),
                                  [](const WriteEntry& a, const WriteEntry& b) { return a.key == b.key; });
    if (dup != write_set.end()) {
        throw LedgerError(Errc::DuplicateWriteKey, "duplicate write key " + dup->key);
    }
    tx_id = compute_id();
}

Value Transaction::to_json() const {
    Value out = body();
    out["tx_id"] = tx_id.hex();
    out["endorsements"] = endorsements;
    out["fee_paid"] = fee_paid.to_value();
    Value events_json = Value::array();
    for (const auto& e : events) events_json.push_back(Value{{"name", e.name}, {"payload", e.payload}});
    out["events"] = std::move(events_json);
    return out;
}

Transaction Transaction::from_json(const Value& json) {
    detail::require_keys(json, {"args", "contract", "endorsements", "events", "fee_paid", "method", "nonce",
                                "read_set", "submitter", "tx_id", "write_set"},
                         "transaction");
    Transaction tx;
    tx.tx_id = Digest::from_hex(get_string(json, "tx_id"));
    tx.contract = get_string(json, "contract");
    tx.method = get_string(json, "method");
    tx.args = get_array(json, "args");
    for (const auto& a : tx.args) {
        if (!is_scalar(a)) throw LedgerError(Errc::Malformed, "args must be integers or strings");
    }
    tx.submitter = get_string(json, "submitter");
    tx.nonce = detail::get_uint(json.at("nonce"), "nonce");
    for (const auto& r : get_array(json, "read_set")) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_string()) throw LedgerError(Errc::Malformed, "bad read entry");
        tx.read_set.push_back({r[0].get<std::string>(), detail::get_uint(r[1], "read version")});
    }
    for (const auto& w : get_array(json, "write_set")) {
        if (!w.is_array() || w.size() != 2 || !w[0].is_string() || !is_scalar(w[1])) {
            throw LedgerError(Errc::Malformed, "bad write entry");
        }
        tx.write_set.push_back({w[0].get<std::string>(), w[1]});
    }
    for (const auto& e : get_array(json, "endorsements")) {
        if (!e.is_string()) throw LedgerError(Errc::Malformed, "endorsement must be a string");
        tx.endorsements.push_back(e.get<std::string>());
    }
    const auto& fee = json.at("fee_paid");
    if (!fee.is_string()) throw LedgerError(Errc::Malformed, "fee_paid must be a digit string");
    tx.fee_paid = Amount::from_units(fee.get_ref<const std::string&>());
    for (const auto& e : get_array(json, "events")) {
        detail::require_keys(e, {"name", "payload"}, "event");
        tx.events.push_back({get_string(e, "name"), e.at("payload")});
    }
    return tx;
}

} // namespace twin::ledger
