// Walks the quartet tree through the main operations.

#include "mdissim/mdissim.hpp"

#include <iostream>

using namespace mdissim;

int main() {
    WeightedTree tree = parse_newick("((1:1,2:1):1,3:1,4:1);");
    DistanceMatrix d = distance_matrix(tree);
    std::cout << "distances    " << to_json(d).dump() << "\n";
    std::cout << "four-point   " << describe(four_point_check(d)) << "\n";

    for (int m = 2; m <= 4; ++m) std::cout << "phi_" << m << "        " << to_json(phi_m(d, m)).dump() << "\n";

    TourMinimum best = phi_m_with_argmin(d, 4, std::vector<int>{1, 2, 3, 4});
    std::cout << "shortest tours of length " << to_string(best.tour_length) << ":";
    for (const auto& tour : best.tours) {
        std::cout << " (";
        for (std::size_t k = 0; k < tour.size(); ++k) std::cout << (k ? " " : "") << tour[k];
        std::cout << ")";
    }
    std::cout << "\n";

    Certificate3 cert = build_certificate(tree);
    std::cout << "certificate  E = " << to_string(cert.E) << ", equidistant tree " << cert.equidistant_newick << "\n";
    for (const auto& row : certificate_table(cert, phi_3(d)))
        std::cout << "  " << row.triple[0] << "," << row.triple[1] << "," << row.triple[2] << ": "
                  << to_string(row.expected) << " = " << to_string(*row.neg_val) << "\n";

    std::cout << "rebuilt      " << serialize_newick(reconstruct_tree(d)) << "\n";
}
