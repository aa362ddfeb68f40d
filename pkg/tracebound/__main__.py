from tracebound.run_tracebound import main

raise SystemExit(main())
