#include <benchmark/benchmark.h>

// The packaged benchmark_main archive is unusable with this toolchain (LTO bytecode).
BENCHMARK_MAIN();
