from bergman_lab.cli import main

main()
