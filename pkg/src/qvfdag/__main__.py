from qvfdag.cli.main import main

raise SystemExit(main())
