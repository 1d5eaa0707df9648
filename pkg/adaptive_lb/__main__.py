from adaptive_lb.cli import main

main()
