#include <fmt/format.h>

#include <cstdlib>
#include <string>

#include "nbscatter/acceptance.hpp"

// Usage: acceptance [id ...]; with no ids every criterion runs.
int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
    if (ids.empty()) ids = nbs::acceptance_ids();
    int failed = 0, waived = 0;
    for (int id : ids) {
        const nbs::CriterionResult r = nbs::run_criterion(id);
        fmt::print("{} criterion {:2d}: {} ({:.1f} s){}\n", r.pass ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                   r.known_unattainable ? " [known unattainable, see README]" : "");
        for (const auto& m : r.measurements) {
            const std::string thr = m.relation == "in" ? fmt::format("in [{:.4g}, {:.4g}]", m.lo, m.hi)
                                    : (m.relation[0] == '<' ? fmt::format("{} {:.4g}", m.relation, m.hi)
                                                            : fmt::format("{} {:.4g}", m.relation, m.lo));
            fmt::print("    [{}] {} = {:.6g}{} (required {})\n", m.pass ? "ok" : "!!", m.name, m.value,
                       m.halfwidth > 0 ? fmt::format(" +- {:.3g}", m.halfwidth) : "", thr);
        }
        if (!r.note.empty()) fmt::print("    note: {}\n", r.note);
        if (!r.pass) (r.known_unattainable ? waived : failed)++;
    }
    fmt::print("SUMMARY: {} passed, {} failed, {} known unattainable\n",
               static_cast<int>(ids.size()) - failed - waived, failed, waived);
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
