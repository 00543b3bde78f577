#include "twin/consensus/gas.hpp"

namespace twin::consensus {

FeeQuote compute_fee(std::int64_t gas_used, const GasSchedule& schedule, const ExchangeRates& rates) {
    FeeQuote q;
    q.fee = Amount{schedule.gas_price.units() * gas_used};
    q.usd = q.fee.to_double() * rates.eth_usd;
    return q;
}

} // namespace twin::consensus
