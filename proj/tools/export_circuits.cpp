// Writes every bundled circuit (and its truth table, when it has one) into a directory.
#include "qcaforge/stdcells.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    if (argc != 2)
    {
        std::cerr << "usage: qcaforge_export <directory>\n";
        return 2;
    }
    const std::string dir = argv[1];
    try
    {
        for (const auto& [name, c] : qcaforge::bundled_circuits())
        {
            qcaforge::save_layout(c.lyt, dir + "/" + name + ".qcaforge");
            if (c.expected_table)
            {
                std::ofstream out(dir + "/" + name + ".table", std::ios::binary);
                out << qcaforge::serialize_truth_table(*c.expected_table);
                if (!out)
                {
                    std::cerr << "cannot write table for " << name << '\n';
                    return 2;
                }
            }
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
