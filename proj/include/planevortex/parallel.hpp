#pragma once
// Process-wide cap on concurrently running heavy tasks (member solves,
// viscosity-ladder solves). The cap only limits how many tasks execute at
// once; results are always reduced in fixed order, so numerical output is
// identical at any degree.

namespace pv {

// k >= 1 caps the pool at k running tasks; k <= 0 restores the hardware
// default (std::thread::hardware_concurrency, at least 1).
void set_max_parallelism(int k);
int max_parallelism();

// RAII slot in the pool; construction blocks until a slot is free.
class ParallelSlot {
  public:
    ParallelSlot();
    ~ParallelSlot();
    ParallelSlot(const ParallelSlot&) = delete;
    ParallelSlot& operator=(const ParallelSlot&) = delete;
};

}  // namespace pv
