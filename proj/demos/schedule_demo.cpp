// Prints the three scheduling matrices of the 4-worker example, their
// validation reports, and what a partially finished cluster can recover.

#include <iostream>

#include "cpgc/decoder.hpp"
#include "cpgc/schedule.hpp"

using namespace cpgc;

namespace {

void show(const ScheduleMatrix& S) {
  std::cout << "== " << to_string(S.scheme()) << " (" << S.rows() << "x" << S.cols()
            << ", blocks " << S.num_blocks();
  if (S.num_virtual() > 0) std::cout << " + " << S.num_virtual() << " padded";
  std::cout << ")\n";
  for (int i = 0; i < S.rows(); ++i) {
    for (int j = 0; j < S.cols(); ++j) std::cout << "\t" << to_string(S.cell(i, j));
    std::cout << "\n";
  }
  const auto report = validate_schedule(S);
  std::cout << "violations: " << report.violation_count()
            << ", warnings: " << report.warning_count() << "\n\n";
}

}  // namespace

int main() {
  const auto mcc = build_mcc(4, 4, 2, MdsPoints::pow2);
  const auto uc = build_uc_mmc(4, 4, 2);
  const auto cp = build_cpgc(4, 4, 2);
  show(mcc);
  show(uc);
  show(cp);

  // Worker 2 finished both tasks, workers 1 and 4 their first one.
  const ScoreVector C{{1, 2, 0, 1}};
  for (const auto* S : {&mcc, &uc, &cp}) {
    const auto received = received_codewords(*S, C, default_delivery(S->scheme()));
    const auto report = recoverable_blocks(received, S->num_blocks(), S->num_virtual());
    std::cout << to_string(S->scheme()) << ": score [1,2,0,1] recovers "
              << report.recoverable.size() << "/" << S->num_blocks() << " blocks\n";
  }
  return 0;
}
