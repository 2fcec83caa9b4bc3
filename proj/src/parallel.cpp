#include "planevortex/parallel.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

namespace pv {

namespace {

std::mutex mu;
std::condition_variable cv;
int cap = 0;  // 0 = uninitialized, resolve lazily to the hardware default
int running = 0;

int hardware_default() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace

void set_max_parallelism(int k) {
    {
        std::lock_guard<std::mutex> lock(mu);
        cap = k >= 1 ? k : hardware_default();
    }
    cv.notify_all();
}

int max_parallelism() {
    std::lock_guard<std::mutex> lock(mu);
    if (cap == 0) cap = hardware_default();
    return cap;
}

ParallelSlot::ParallelSlot() {
    std::unique_lock<std::mutex> lock(mu);
    if (cap == 0) cap = hardware_default();
    cv.wait(lock, [] { return running < cap; });
    ++running;
}

ParallelSlot::~ParallelSlot() {
    {
        std::lock_guard<std::mutex> lock(mu);
        --running;
    }
    cv.notify_one();
}

}  // namespace pv
