#include <fstream>
#include <iostream>

#include "flagcalc/ipm.hpp"
#include "flagcalc/sdpa.hpp"

// Minimal SDPA-format solver driver: sdpa_solve input.dat-s output.sol
// Reads a sparse SDPA problem, runs the interior point method, writes a
// CSDP-convention solution file. Exists so the library's external-solver
// path can be exercised without installing csdp or sdpa.
int main(int argc, char** argv) {
    using namespace flagcalc;
    if (argc != 3) {
        std::cerr << "usage: sdpa_solve input.dat-s output.sol\n";
        return 2;
    }
    try {
        std::ifstream is(argv[1]);
        if (!is) throw std::runtime_error(std::string("cannot open ") + argv[1]);
        SdpInstance inst = read_sdpa(is);
        SdpSolution sol = ipm_solve(inst);
        std::ofstream os(argv[2]);
        if (!os) throw std::runtime_error(std::string("cannot open ") + argv[2]);
        write_sol(os, inst, sol);
    } catch (const std::exception& ex) {
        std::cerr << "sdpa_solve: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
