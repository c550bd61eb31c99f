#pragma once
// Reference computations written independently of the engine, plus the
// seeded scenario generator used by property and acceptance tests.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "aide/emolex.hpp"
#include "aide/htnplan.hpp"
#include "aide/meddomain.hpp"
#include "aide/needsense.hpp"

namespace oracle {

inline const std::array<aide::Weekday, 7> kDays{aide::Weekday::Sunday,   aide::Weekday::Monday, aide::Weekday::Tuesday,
                                                aide::Weekday::Wednesday, aide::Weekday::Thursday,
                                                aide::Weekday::Friday,   aide::Weekday::Saturday};
inline const std::array<aide::Slot, 4> kSlots{aide::Slot::Morning, aide::Slot::Afternoon, aide::Slot::Evening,
                                              aide::Slot::Bedtime};

inline std::set<std::string> medications_of(const aide::SortingGridState& grid, const aide::Schedule& schedule) {
    std::set<std::string> meds = grid.medications();
    for (const auto& m : schedule.medications()) meds.insert(m);
    return meds;
}

// Sum over every (day, slot, med) cell of |placed - required|.
inline int cell_diff(const aide::SortingGridState& grid, const aide::Schedule& schedule) {
    int total = 0;
    for (const auto& med : medications_of(grid, schedule)) {
        for (auto day : kDays) {
            for (auto slot : kSlots) {
                const aide::CellKey key{{day, slot}, med};
                total += std::abs(grid.count(key) - schedule.count(key));
            }
        }
    }
    return total;
}

// Required count per cell, recomputed cell by cell: base doses, minus events
// leaving the cell, plus events arriving in it.
inline std::map<std::tuple<int, int, std::string>, int> schedule_by_cells(
    const std::vector<aide::Prescription>& prescriptions, const std::vector<aide::LifeEvent>& events) {
    std::map<std::tuple<int, int, std::string>, int> out;
    std::set<std::string> meds;
    for (const auto& p : prescriptions) meds.insert(p.medication);
    for (const auto& med : meds) {
        for (auto day : kDays) {
            for (auto slot : kSlots) {
                int required = 0;
                for (const auto& p : prescriptions) {
                    if (p.medication != med) continue;
                    auto it = p.doses.find(aide::SlotId{day, slot});
                    if (it != p.doses.end()) required += it->second;
                }
                for (const auto& e : events) {
                    if (e.medication != med || e.day != day) continue;
                    if (e.from_slot == slot) --required;
                    if (e.to_slot == slot) ++required;
                }
                if (required != 0) out[{static_cast<int>(day), static_cast<int>(slot), med}] = required;
            }
        }
    }
    return out;
}

struct OracleDiscrepancy {
    std::string kind;
    std::string med;
    int day;
    int at;      // -1 when absent
    int needed;  // -1 when absent
    bool operator==(const OracleDiscrepancy&) const = default;
};

// (day, anchor slot, med): the at slot when present, else the needed slot.
inline std::tuple<int, int, std::string> sort_key(const OracleDiscrepancy& d) {
    return {d.day, d.at >= 0 ? d.at : d.needed, d.med};
}

// Per (med, day): surplus and deficit units listed slot by slot, paired by
// index, leftovers reported as extra/missing.
inline std::vector<OracleDiscrepancy> discrepancies(const aide::SortingGridState& grid,
                                                    const aide::Schedule& schedule) {
    std::vector<OracleDiscrepancy> out;
    for (const auto& med : medications_of(grid, schedule)) {
        for (auto day : kDays) {
            std::vector<int> surplus, deficit;
            for (auto slot : kSlots) {
                const aide::CellKey key{{day, slot}, med};
                const int diff = grid.count(key) - schedule.count(key);
                for (int i = 0; i < diff; ++i) surplus.push_back(static_cast<int>(slot));
                for (int i = 0; i < -diff; ++i) deficit.push_back(static_cast<int>(slot));
            }
            const std::size_t pairs = std::min(surplus.size(), deficit.size());
            for (std::size_t i = 0; i < pairs; ++i) {
                out.push_back({"wrong_time", med, static_cast<int>(day), surplus[i], deficit[i]});
            }
            for (std::size_t i = pairs; i < surplus.size(); ++i) {
                out.push_back({"extra_pill", med, static_cast<int>(day), surplus[i], -1});
            }
            for (std::size_t i = pairs; i < deficit.size(); ++i) {
                out.push_back({"missing_pill", med, static_cast<int>(day), -1, deficit[i]});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const OracleDiscrepancy& a, const OracleDiscrepancy& b) { return sort_key(a) < sort_key(b); });
    return out;
}

inline OracleDiscrepancy to_oracle(const aide::Discrepancy& d) {
    return {std::string(aide::to_string(d.kind)), d.medication, static_cast<int>(d.day),
            d.at_slot ? static_cast<int>(*d.at_slot) : -1, d.needed_slot ? static_cast<int>(*d.needed_slot) : -1};
}

// ------------------------------------------------------------ naive Bayes

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        const unsigned char c = static_cast<unsigned char>(ch);
        if (c < 128 && std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

struct NBOracle {
    std::map<aide::EmotionLabel, int> docs;
    std::map<aide::EmotionLabel, std::map<std::string, int>> counts;
    std::map<aide::EmotionLabel, int> totals;
    std::set<std::string> vocab;
    int n = 0;
    double alpha = 1.0;

    NBOracle(const std::vector<aide::LabeledConversation>& corpus, double a) : alpha(a) {
        for (const auto& item : corpus) {
            ++n;
            ++docs[item.label];
            for (const auto& turn : item.conversation.turns) {
                for (const auto& w : split_words(turn)) {
                    ++counts[item.label][w];
                    ++totals[item.label];
                    vocab.insert(w);
                }
            }
        }
    }

    double log_likelihood(aide::EmotionLabel label, const std::string& token) const {
        int c = 0;
        if (auto it = counts.find(label); it != counts.end()) {
            if (auto jt = it->second.find(token); jt != it->second.end()) c = jt->second;
        }
        const int total = totals.count(label) ? totals.at(label) : 0;
        return std::log((c + alpha) / (total + alpha * static_cast<double>(vocab.size())));
    }

    // Posterior per label: exp(score) / sum exp(score), computed in long double.
    std::map<aide::EmotionLabel, double> posteriors(const aide::Conversation& conv) const {
        std::map<aide::EmotionLabel, long double> score;
        for (const auto& [label, d] : docs) {
            long double s = std::log(static_cast<long double>(d) / n);
            for (const auto& turn : conv.turns) {
                for (const auto& w : split_words(turn)) {
                    if (vocab.count(w)) s += log_likelihood(label, w);
                }
            }
            score[label] = s;
        }
        long double top = -1e300L;
        for (const auto& [l, s] : score) top = std::max(top, s);
        long double z = 0;
        for (const auto& [l, s] : score) z += std::exp(s - top);
        std::map<aide::EmotionLabel, double> out;
        for (const auto& [l, s] : score) out[l] = static_cast<double>(std::exp(s - top) / z);
        return out;
    }
};

// ----------------------------------------------------------------- fusion

inline double fused_score(const std::vector<aide::IndicatorReading>& readings, const aide::FusionConfig& config) {
    double num = 0, den = 0;
    for (const auto& r : readings) {
        const double w = config.weights.at(r.source);
        const double c = config.confidence_weighted ? r.confidence : 1.0;
        num += w * r.score * c;
        den += w * c;
    }
    if (den <= 0) return 0.0;
    return std::clamp(num / den, 0.0, 1.0);
}

inline int bucket(double score, const std::array<double, 3>& t) {
    if (score >= t[2]) return 3;
    if (score >= t[1]) return 2;
    if (score >= t[0]) return 1;
    return 0;
}

// ------------------------------------------------------- random scenarios

struct RandomInstance {
    aide::Scenario scenario;
    aide::Schedule schedule;
};

inline RandomInstance random_instance(std::mt19937_64& rng, int max_discrepancies = 10) {
    static const std::array<std::string, 3> names{"alpha", "beta", "gamma"};
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (;;) {
        aide::Scenario sc;
        const int meds = pick(1, 3);
        for (int m = 0; m < meds; ++m) {
            sc.medications.push_back(
                aide::Medication{names[m], static_cast<aide::Color>(pick(0, 8)), static_cast<aide::Shape>(pick(0, 6))});
            aide::Prescription rx{names[m], {}};
            for (auto day : kDays) {
                for (auto slot : kSlots) {
                    if (pick(0, 3) == 0) rx.doses[{day, slot}] = pick(1, 2);
                }
            }
            if (rx.doses.empty()) rx.doses[{kDays[pick(0, 6)], kSlots[pick(0, 3)]}] = 1;
            sc.prescriptions.push_back(rx);
        }
        // Occasionally move a dose earlier on its day.
        for (int e = pick(0, 2); e > 0; --e) {
            const auto& rx = sc.prescriptions[pick(0, meds - 1)];
            std::vector<aide::SlotId> dosed;
            for (const auto& [at, c] : rx.doses) {
                if (at.slot != aide::Slot::Morning) dosed.push_back(at);
            }
            if (dosed.empty()) continue;
            const auto at = dosed[pick(0, static_cast<int>(dosed.size()) - 1)];
            const auto to = static_cast<aide::Slot>(pick(0, static_cast<int>(at.slot) - 1));
            sc.events.push_back(aide::LifeEvent{"e" + std::to_string(sc.events.size()), rx.medication, at.day,
                                                at.slot, to, "appointment, take earlier"});
        }
        aide::Schedule schedule;
        try {
            schedule = sc.schedule();
        } catch (const std::exception&) {
            continue;  // two events drew the same dose
        }
        aide::SortingGridState grid;
        for (const auto& [key, count] : schedule.cells()) grid.set(key, count);
        for (int k = pick(0, max_discrepancies); k > 0; --k) {
            const aide::CellKey key{{kDays[pick(0, 6)], kSlots[pick(0, 3)]}, names[pick(0, meds - 1)]};
            if (pick(0, 1) == 0 || grid.count(key) == 0) {
                if (grid.count(key) < 10) grid.add(key, 1);
            } else {
                grid.add(key, -1);
            }
        }
        if (static_cast<int>(aide::validate_grid(grid, schedule).size()) > max_discrepancies) continue;
        sc.initial_grid = grid;
        return {sc, schedule};
    }
}

}  // namespace oracle
