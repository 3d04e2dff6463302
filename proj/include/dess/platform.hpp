#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace dess {

/// Every frame allocates a few large buffers; keep them on the heap instead
/// of returning them to the kernel each time. Call once at program start.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace dess
